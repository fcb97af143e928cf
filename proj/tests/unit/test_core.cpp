#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "synthetic.hpp"
#include "vithsd/core/csv.hpp"
#include "vithsd/core/dataset.hpp"
#include "vithsd/core/errors.hpp"
#include "vithsd/core/labels.hpp"
#include "vithsd/core/text.hpp"

using namespace vithsd;

namespace {

template <typename F>
ErrorCode code_of_throw(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an Error";
    return ErrorCode::IoError;
}

LabelVector vec(std::array<int, 5> codes) { return LabelVector::from_codes(codes); }

}  // namespace

TEST(Types, FiveTargetsWithUniqueLowercaseSlugs) {
    std::set<std::string> seen;
    for (Target t : kAllTargets) {
        const std::string s(slug(t));
        EXPECT_TRUE(seen.insert(s).second);
        for (char c : s) EXPECT_FALSE(std::isupper(static_cast<unsigned char>(c)));
    }
    EXPECT_EQ(seen.size(), 5u);
}

TEST(Types, LevelCodesRoundTrip) {
    for (int c = 0; c < 4; ++c) EXPECT_EQ(code_of(level_from_code(c)), c);
    EXPECT_EQ(code_of_throw([] { level_from_code(4); }), ErrorCode::InvalidLevel);
    EXPECT_EQ(code_of_throw([] { level_from_code(-1); }), ErrorCode::InvalidLevel);
}

TEST(Types, AliasesCoverObservedSpellings) {
    EXPECT_EQ(resolve_target("group"), Target::Groups);
    EXPECT_EQ(resolve_target("politic"), Target::Politics);
    EXPECT_EQ(resolve_target("race/ethnic"), Target::RaceEthnicity);
    EXPECT_EQ(resolve_target("religion/creed"), Target::ReligionCreed);
    EXPECT_EQ(resolve_target("race/ethnicity"), Target::RaceEthnicity);
    EXPECT_EQ(resolve_target("Individuals"), Target::Individuals);
    EXPECT_FALSE(resolve_target("sports").has_value());
}

TEST(Types, AliasTableIsAFunction) {
    std::map<std::string, Target> seen;
    for (const auto& [alias, target] : target_aliases()) {
        auto [it, fresh] = seen.emplace(alias, target);
        if (!fresh) EXPECT_EQ(it->second, target) << alias;
        EXPECT_EQ(resolve_target(alias), target) << alias;
    }
    for (Target t : kAllTargets) EXPECT_EQ(resolve_target(slug(t)), t);
}

TEST(Types, NormalNeverBecomesATerm) {
    EXPECT_EQ(code_of_throw([] { TargetLevelTerm(Target::Groups, HatredLevel::Normal); }), ErrorCode::InvalidLevel);
}

TEST(Types, PackedIndexIsABijection) {
    std::set<std::uint32_t> seen;
    for (std::uint32_t p = 0; p < 1024; ++p) {
        const auto v = LabelVector::unpack(p);
        EXPECT_EQ(v.packed(), p);
        seen.insert(p);
    }
    EXPECT_EQ(seen.size(), 1024u);
}

TEST(Labels, ParseTableNineRowOne) {
    const auto terms = parse_label_list("[individuals#hate, group#hate]");
    ASSERT_EQ(terms.size(), 2u);
    EXPECT_EQ(terms[0], TargetLevelTerm(Target::Individuals, HatredLevel::Hate));
    EXPECT_EQ(terms[1], TargetLevelTerm(Target::Groups, HatredLevel::Hate));
}

TEST(Labels, ParseWithoutCommasAndAliases) {
    const auto terms = parse_label_list("[individuals#hate group#hate]");
    EXPECT_EQ(terms.size(), 2u);
    const auto t3 = parse_label_list("[group#offensive, politic#offensive]");
    ASSERT_EQ(t3.size(), 2u);
    EXPECT_EQ(t3[0], TargetLevelTerm(Target::Groups, HatredLevel::Offensive));
    EXPECT_EQ(t3[1], TargetLevelTerm(Target::Politics, HatredLevel::Offensive));
    const auto t5 = parse_label_list("[race/ethnic#offensive]");
    ASSERT_EQ(t5.size(), 1u);
    EXPECT_EQ(t5[0].target(), Target::RaceEthnicity);
}

TEST(Labels, ParseEmptyAndNormalizesOrder) {
    EXPECT_TRUE(parse_label_list("[]").empty());
    EXPECT_TRUE(parse_label_list("[ ]").empty());
    const auto terms = parse_label_list("[politics#clean, individuals#hate, politics#clean]");
    ASSERT_EQ(terms.size(), 2u);
    EXPECT_EQ(terms[0].target(), Target::Individuals);
    EXPECT_EQ(terms[1].target(), Target::Politics);
}

TEST(Labels, ParseErrors) {
    EXPECT_EQ(code_of_throw([] { parse_label_list("[sports#hate]"); }), ErrorCode::UnknownTarget);
    EXPECT_EQ(code_of_throw([] { parse_label_list("[groups#angry]"); }), ErrorCode::InvalidLevel);
    EXPECT_EQ(code_of_throw([] { parse_label_list("[groups#normal]"); }), ErrorCode::InvalidLevel);
    EXPECT_EQ(code_of_throw([] { parse_label_list("[groups#hate, group#clean]"); }), ErrorCode::ConflictingTerm);
    EXPECT_EQ(code_of_throw([] { parse_label_list("groups#hate"); }), ErrorCode::ParseError);
    EXPECT_EQ(code_of_throw([] { parse_label_list("[groups]"); }), ErrorCode::ParseError);
}

TEST(Labels, TermsToVector) {
    EXPECT_EQ(terms_to_label_vector({{Target::Individuals, HatredLevel::Hate}}), vec({3, 0, 0, 0, 0}));
    EXPECT_EQ(terms_to_label_vector({}), LabelVector{});
    EXPECT_EQ(
        terms_to_label_vector({{Target::Groups, HatredLevel::Offensive}, {Target::Politics, HatredLevel::Hate}}),
        vec({0, 2, 0, 0, 3}));
    EXPECT_EQ(code_of_throw([] {
                  terms_to_label_vector({{Target::Groups, HatredLevel::Hate}, {Target::Groups, HatredLevel::Hate}});
              }),
              ErrorCode::ConflictingTerm);
}

TEST(Labels, VectorToTerms) {
    EXPECT_TRUE(label_vector_to_terms(LabelVector{}).empty());
    const auto terms = label_vector_to_terms(vec({3, 3, 0, 0, 0}));
    ASSERT_EQ(terms.size(), 2u);
    EXPECT_EQ(terms[0].str(), "individuals#hate");
    EXPECT_EQ(terms[1].str(), "groups#hate");
}

TEST(Labels, RoundTripExhaustive) {
    for (std::uint32_t p = 0; p < 1024; ++p) {
        const auto v = LabelVector::unpack(p);
        const auto terms = label_vector_to_terms(v);
        EXPECT_EQ(terms_to_label_vector(terms), v);
        for (const auto& t : terms) EXPECT_NE(t.level(), HatredLevel::Normal);
        const auto s = format_label_list(terms);
        EXPECT_EQ(parse_label_list(s), terms) << s;
        EXPECT_EQ(format_label_list(parse_label_list(s)), s);
    }
}

TEST(Text, Examples) {
    EXPECT_EQ(preprocess_text("Nhanh thực sự"), "nhanh thực sự");
    EXPECT_EQ(preprocess_text(""), "");
    EXPECT_EQ(preprocess_text("Đm http://x.co !!!!!!"), "đm <url> !!!");
}

TEST(Text, Rules) {
    EXPECT_EQ(preprocess_text("  a \t\n b  "), "a b");
    EXPECT_EQ(preprocess_text("hayyyyyy"), "hayyy");
    EXPECT_EQ(preprocess_text("see www.example.com now"), "see <url> now");
    EXPECT_EQ(preprocess_text("x\x01y"), "xy");
    EXPECT_EQ(preprocess_text("ok 😂😂😂😂 :))))"), "ok 😂😂😂 :)))");
    // Decomposed "ệ" (e + combining dot below + circumflex) composes.
    EXPECT_EQ(preprocess_text("Vi\xC3\xAA\xCC\xA3t"), "vi\xE1\xBB\x87t");
}

TEST(Text, IdempotentOnRandomInput) {
    std::mt19937_64 rng(11);
    const std::vector<std::string> pieces = {"A", "a", "w", "ww", "www.", "http://", "x.co", " ", "\t", "\x02",
                                             "!", "😂", "Đ", "ệ", "e\xCC\x82", ".", "\n", "aaaa"};
    std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
    std::uniform_int_distribution<int> len(0, 20);
    for (int i = 0; i < 2000; ++i) {
        std::string s;
        const int n = len(rng);
        for (int k = 0; k < n; ++k) s += pieces[pick(rng)];
        const auto once = preprocess_text(s);
        EXPECT_EQ(preprocess_text(once), once) << s;
    }
}

TEST(Text, TokenizerSplitsPunctuation) {
    EXPECT_EQ(tokenize("a b a"), (std::vector<std::string>{"a", "b", "a"}));
    EXPECT_EQ(tokenize("đẹp quá!!"), (std::vector<std::string>{"đẹp", "quá", "!", "!"}));
    EXPECT_TRUE(tokenize("   ").empty());
}

TEST(Csv, QuotedFieldsAndNewlines) {
    std::istringstream in("\xEF\xBB\xBFid,text\r\n1,\"hello, \"\"world\"\"\nnext\"\r\n2,plain\n");
    csv::Reader r(in);
    auto h = r.next();
    ASSERT_TRUE(h);
    EXPECT_EQ((*h)[0], "id");
    auto row = r.next();
    ASSERT_TRUE(row);
    EXPECT_EQ((*row)[1], "hello, \"world\"\nnext");
    auto row2 = r.next();
    ASSERT_TRUE(row2);
    EXPECT_EQ(r.line(), 4u);
    EXPECT_FALSE(r.next());
}

TEST(Csv, UnterminatedQuote) {
    std::istringstream in("a,\"b\n");
    csv::Reader r(in);
    EXPECT_EQ(code_of_throw([&] { r.next(); }), ErrorCode::ParseError);
}

TEST(Csv, FormatRoundTrip) {
    const csv::Row row = {"a", "b,c", "d\"e", "f\ng", ""};
    std::istringstream in(csv::format_row(row) + "\n");
    csv::Reader r(in);
    EXPECT_EQ(*r.next(), row);
}

class DatasetFiles : public ::testing::Test {
protected:
    fixtures::TempDir dir{"vithsd-core"};
    std::filesystem::path write(const std::string& name, const std::string& content) {
        auto p = dir / name;
        std::ofstream(p, std::ios::binary) << content;
        return p;
    }
};

TEST_F(DatasetFiles, LoadsWithAliasHeaders) {
    const auto p = write("a.csv",
                         "content,individual,group,religion,race,politic\n"
                         "\"Nhanh thực sự\",0,0,0,0,0\n"
                         "xấu quá,3,2,0,0,1\n");
    const auto rows = load_dataset(p);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].comment.id, "0");
    EXPECT_EQ(rows[1].comment.id, "1");
    EXPECT_EQ(rows[1].labels, vec({3, 2, 0, 0, 1}));
}

TEST_F(DatasetFiles, ZeroRowsIsEmpty) {
    const auto p = write("b.csv", "id,text,individuals,groups,religion/creed,race/ethnicity,politics\n");
    EXPECT_TRUE(load_dataset(p).empty());
}

TEST_F(DatasetFiles, LabelFourNamesTheRow) {
    const auto p = write("c.csv", "id,text,individuals,groups,religion/creed,race/ethnicity,politics\n"
                                  "x1,ok,0,0,0,0,0\n"
                                  "x2,bad,4,0,0,0,0\n");
    try {
        load_dataset(p);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidLevel);
        EXPECT_NE(std::string(e.what()).find("row 1 (line 3)"), std::string::npos) << e.what();
    }
}

TEST_F(DatasetFiles, MissingColumnAndFile) {
    const auto p = write("d.csv", "id,text,individuals,groups\n1,a,0,0\n");
    EXPECT_EQ(code_of_throw([&] { load_dataset(p); }), ErrorCode::SchemaError);
    EXPECT_EQ(code_of_throw([&] { load_dataset(dir / "missing.csv"); }), ErrorCode::IoError);
}

TEST_F(DatasetFiles, ExplicitColumnMap) {
    const auto p = write("e.csv", "body,t1,t2,t3,t4,t5\nhello,1,0,0,0,0\n");
    ColumnMap m;
    m.text_column = "body";
    m.label_columns = {"t1", "t2", "t3", "t4", "t5"};
    const auto rows = load_dataset(p, m);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].labels[Target::Individuals], HatredLevel::Clean);
}

TEST_F(DatasetFiles, WriteThenLoad) {
    const auto corpus = fixtures::keyword_corpus(50, 3);
    const auto p = dir / "round.csv";
    write_dataset(p, corpus);
    const auto back = load_dataset(p);
    ASSERT_EQ(back.size(), corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        EXPECT_EQ(back[i].comment.id, corpus[i].comment.id);
        EXPECT_EQ(back[i].comment.text, corpus[i].comment.text);
        EXPECT_EQ(back[i].labels, corpus[i].labels);
    }
}

TEST_F(DatasetFiles, BlankTextRejected) {
    const auto p = write("f.csv", "id,text,individuals,groups,religion/creed,race/ethnicity,politics\n1,  ,0,0,0,0,0\n");
    EXPECT_EQ(code_of_throw([&] { load_dataset(p); }), ErrorCode::InvalidComment);
}
