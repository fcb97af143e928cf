// vithsd command-line tool: offline dataset, annotation, training and
// evaluation workflows, plus streaming runs and the HTTP service.

#include <fstream>
#include <iostream>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "commands.hpp"
#include "vithsd/annotation/agreement.hpp"
#include "vithsd/annotation/annotation_io.hpp"
#include "vithsd/annotation/vote.hpp"
#include "vithsd/classifier/model_io.hpp"
#include "vithsd/classifier/predictor.hpp"
#include "vithsd/classifier/training.hpp"
#include "vithsd/core/dataset.hpp"
#include "vithsd/core/errors.hpp"
#include "vithsd/metrics/report.hpp"
#include "vithsd/metrics/stats.hpp"

namespace {

using namespace vithsd;

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorCode::IoError, "cannot write '" + path + "'");
    out << content;
}

struct DatasetOptions {
    std::string text_column;
    std::string id_column;
    std::vector<std::string> label_columns;

    void add(CLI::App* cmd) {
        cmd->add_option("--text-column", text_column, "Text column (default: detected)");
        cmd->add_option("--id-column", id_column, "Id column (default: detected, else row index)");
        cmd->add_option("--label-columns", label_columns, "Five label columns in target order")
            ->expected(5)
            ->delimiter(',');
    }

    std::optional<ColumnMap> map() const {
        if (text_column.empty() && label_columns.empty()) return std::nullopt;
        if (text_column.empty() || label_columns.size() != kNumTargets) {
            raise(ErrorCode::InvalidConfig, "--text-column and five --label-columns are needed together");
        }
        ColumnMap m;
        m.text_column = text_column;
        if (!id_column.empty()) m.id_column = id_column;
        for (std::size_t i = 0; i < kNumTargets; ++i) m.label_columns[i] = label_columns[i];
        return m;
    }
};

void add_dataset_commands(CLI::App& app) {
    auto* dataset = app.add_subcommand("dataset", "Dataset statistics and validation");
    dataset->require_subcommand(1);

    {
        auto* cmd = dataset->add_subcommand("stats", "Overview, length distribution and label counts per split");
        auto inputs = std::make_shared<std::vector<std::string>>();
        auto names = std::make_shared<std::vector<std::string>>();
        auto json_out = std::make_shared<std::string>();
        auto expect = std::make_shared<std::string>();
        auto opts = std::make_shared<DatasetOptions>();
        cmd->add_option("--input", *inputs, "CSV split file (repeatable)")->required();
        cmd->add_option("--name", *names, "Column name per input (default: file stem)");
        cmd->add_option("--json", *json_out, "Also write the statistics as JSON");
        cmd->add_option("--expect", *expect, "JSON of reference values per split name; prints a divergence report");
        opts->add(cmd);
        cmd->callback([=] {
            std::vector<std::pair<std::string, metrics::DatasetStats>> splits;
            for (std::size_t i = 0; i < inputs->size(); ++i) {
                const auto& path = (*inputs)[i];
                const std::string name =
                    i < names->size() ? (*names)[i] : std::filesystem::path(path).stem().string();
                splits.emplace_back(name, metrics::dataset_stats(load_dataset(path, opts->map())));
            }
            std::cout << metrics::format_stats_table(splits);
            if (!json_out->empty()) {
                nlohmann::json j = nlohmann::json::object();
                for (const auto& [name, st] : splits) j[name] = metrics::to_json(st);
                write_text(*json_out, j.dump(2) + "\n");
            }
            if (!expect->empty()) {
                std::ifstream in(*expect);
                if (!in) raise(ErrorCode::IoError, "cannot read '" + *expect + "'");
                nlohmann::json ref;
                try {
                    in >> ref;
                } catch (const nlohmann::json::exception& e) {
                    raise(ErrorCode::ParseError, *expect + ": " + e.what());
                }
                std::cout << "\n";
                for (const auto& [name, st] : splits) {
                    if (!ref.contains(name)) continue;
                    std::cout << metrics::format_divergences(
                        name, metrics::compare_stats(st, metrics::ExpectedStats::from_json(ref[name])));
                }
            }
        });
    }
    {
        auto* cmd = dataset->add_subcommand("validate", "Check that a split loads cleanly");
        auto input = std::make_shared<std::string>();
        auto opts = std::make_shared<DatasetOptions>();
        cmd->add_option("--input", *input, "CSV split file")->required();
        opts->add(cmd);
        cmd->callback([=] {
            const auto rows = load_dataset(*input, opts->map());
            std::set<std::string> ids;
            for (const auto& r : rows) {
                if (!ids.insert(r.comment.id).second) {
                    raise(ErrorCode::InvalidComment, "duplicate comment id '" + r.comment.id + "'");
                }
            }
            std::cout << *input << ": " << rows.size() << " comments, ok\n";
        });
    }
}

void add_agreement_commands(CLI::App& app) {
    {
        auto* agreement = app.add_subcommand("agreement", "Inter-annotator agreement");
        agreement->require_subcommand(1);
        auto* cmd = agreement->add_subcommand("compute", "Pairwise Cohen's kappa per target");
        auto records = std::make_shared<std::string>();
        auto mode = std::make_shared<std::string>("both");
        auto json = std::make_shared<bool>(false);
        cmd->add_option("--records", *records, "Annotation records CSV")->required();
        cmd->add_option("--mode", *mode, "with-levels, without-levels or both")
            ->check(CLI::IsMember({"with-levels", "without-levels", "both"}));
        cmd->add_flag("--json", *json, "Print JSON instead of CSV");
        cmd->callback([=] {
            const auto recs = annotation::load_annotation_records(*records);
            std::vector<annotation::AgreementMode> modes;
            if (*mode != "without-levels") modes.push_back(annotation::AgreementMode::WithLevels);
            if (*mode != "with-levels") modes.push_back(annotation::AgreementMode::Presence);
            nlohmann::json all = nlohmann::json::object();
            for (auto m : modes) {
                const auto rep = annotation::agreement_report(recs, m);
                const std::string key = m == annotation::AgreementMode::WithLevels ? "with_levels" : "without_levels";
                if (*json) {
                    all[key] = annotation::to_json(rep);
                } else {
                    if (modes.size() > 1) std::cout << "# " << key << "\n";
                    std::cout << annotation::agreement_csv(rep);
                }
            }
            if (*json) std::cout << all.dump(2) << "\n";
        });
    }
    {
        auto* cmd = app.add_subcommand("vote", "Majority vote per comment and target");
        auto records = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        cmd->add_option("--records", *records, "Annotation records CSV")->required();
        cmd->add_option("--out", *out, "Write the votes CSV here instead of stdout");
        cmd->callback([=] {
            const auto votes = annotation::vote_all(annotation::load_annotation_records(*records));
            const auto csv = annotation::votes_csv(votes);
            if (out->empty()) std::cout << csv;
            else write_text(*out, csv);
        });
    }
}

void add_model_commands(CLI::App& app) {
    {
        auto* cmd = app.add_subcommand("train", "Train the five-head hashed linear model");
        auto input = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto cfg = std::make_shared<classifier::TrainConfig>();
        auto opts = std::make_shared<DatasetOptions>();
        auto quiet = std::make_shared<bool>(false);
        cmd->add_option("--train", *input, "Training CSV")->required();
        cmd->add_option("--out", *out, "Model file to write")->required();
        cmd->add_option("--epochs", cfg->epochs, "Passes over the data")->capture_default_str();
        cmd->add_option("--lr", cfg->learning_rate, "Learning rate")->capture_default_str();
        cmd->add_option("--momentum", cfg->momentum, "Momentum")->capture_default_str();
        cmd->add_option("--batch", cfg->batch_size, "Mini-batch size")->capture_default_str();
        cmd->add_option("--l2", cfg->l2, "L2 penalty on weights")->capture_default_str();
        cmd->add_option("--seed", cfg->seed, "Shuffle seed")->capture_default_str();
        cmd->add_option("--dim", cfg->dim, "Hashed feature dimension")->capture_default_str();
        cmd->add_flag("--quiet", *quiet, "No per-epoch loss lines");
        opts->add(cmd);
        cmd->callback([=] {
            const auto data = load_dataset(*input, opts->map());
            const auto model = classifier::train(data, *cfg, [&](std::size_t epoch, double loss) {
                if (!*quiet) std::cerr << "epoch " << epoch << " loss " << loss << "\n";
            });
            classifier::save_model(model, std::filesystem::path(*out));
            std::cout << "wrote " << *out << " (" << model.model_id << ", " << data.size() << " comments)\n";
        });
    }
    {
        auto* cmd = app.add_subcommand("predict", "Label comments with a trained model");
        auto model_path = std::make_shared<std::string>();
        auto input = std::make_shared<std::string>();
        auto text = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto opts = std::make_shared<DatasetOptions>();
        cmd->add_option("--model", *model_path, "Model file")->required();
        auto* in_opt = cmd->add_option("--input", *input, "CSV of comments (label columns optional)");
        auto* text_opt = cmd->add_option("--text", *text, "Single comment text");
        in_opt->excludes(text_opt);
        cmd->add_option("--out", *out, "Prediction lines file (default stdout)");
        opts->add(cmd);
        cmd->callback([=] {
            if (input->empty() && text->empty()) raise(ErrorCode::InvalidConfig, "give --input or --text");
            const auto model = classifier::load_model(std::filesystem::path(*model_path));
            std::vector<Comment> comments;
            if (!text->empty()) {
                comments.push_back({"0", *text, std::nullopt, "cli"});
            } else {
                for (auto& lc : load_dataset(*input, opts->map())) comments.push_back(std::move(lc.comment));
            }
            std::ofstream file;
            if (!out->empty()) {
                file.open(*out, std::ios::binary);
                if (!file) raise(ErrorCode::IoError, "cannot write '" + *out + "'");
            }
            std::ostream& os = out->empty() ? std::cout : file;
            for (const auto& c : comments) {
                validate_comment(c);
                os << classifier::prediction_to_wire(classifier::predict_labels(model, c)).dump() << "\n";
            }
        });
    }
    {
        auto* cmd = app.add_subcommand("evaluate", "Target-only and target+level P/R/F1 against gold labels");
        auto pred = std::make_shared<std::string>();
        auto gold = std::make_shared<std::string>();
        auto json_out = std::make_shared<std::string>();
        auto name = std::make_shared<std::string>("model");
        auto confusion = std::make_shared<bool>(false);
        auto opts = std::make_shared<DatasetOptions>();
        cmd->add_option("--pred", *pred, "Prediction lines (id, terms)")->required();
        cmd->add_option("--gold", *gold, "Gold CSV")->required();
        cmd->add_option("--name", *name, "Model name for the table")->capture_default_str();
        cmd->add_option("--json", *json_out, "Also write the full report as JSON");
        cmd->add_flag("--confusion", *confusion, "Print per-target confusion matrices");
        opts->add(cmd);
        cmd->callback([=] {
            const auto preds = metrics::load_prediction_file(*pred);
            const auto golds = load_dataset(*gold, opts->map());
            const auto report = metrics::evaluate_predictions(*name, preds, golds);
            std::cout << metrics::format_table(report);
            if (*confusion) std::cout << "\n" << metrics::format_confusion(report.confusion);
            if (!json_out->empty()) write_text(*json_out, metrics::to_json(report).dump(2) + "\n");
        });
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vithsd: targeted hate-speech annotation, classification and streaming"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "vithsd 0.1.0");
    add_dataset_commands(app);
    add_agreement_commands(app);
    add_model_commands(app);
    vithsd::cli::add_stream_commands(app);
    vithsd::cli::add_serve_command(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const vithsd::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
