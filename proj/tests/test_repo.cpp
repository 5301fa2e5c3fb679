#include <doctest.h>

#include <algorithm>
#include <fstream>

#include "ctxmine/errors.hpp"
#include "ctxmine/extractor.hpp"
#include "ctxmine/git_repo.hpp"
#include "ctxmine/repo_types.hpp"
#include "ctxmine/timeutil.hpp"
#include "fixture_repo.hpp"

using namespace ctxmine;
using namespace ctxmine::repo;

namespace {

RepoMeta meta(long commits, long contributors, long issues, long stars) {
    RepoMeta m;
    m.commits = commits;
    m.contributors = contributors;
    m.issues = issues;
    m.stars = stars;
    return m;
}

IssueRecord issue(long id, UtcSeconds opened, std::optional<UtcSeconds> closed = {}) {
    IssueRecord i;
    i.id = id;
    i.title = "issue " + std::to_string(id);
    i.opened_at = opened;
    i.closed_at = closed;
    return i;
}

}  // namespace

TEST_CASE("iso8601 round trip") {
    CHECK(parse_iso8601("1970-01-01T00:00:00Z") == 0);
    CHECK(parse_iso8601("2020-03-01T12:30:45Z") == 1583065845);
    CHECK(format_iso8601(1583065845) == "2020-03-01T12:30:45Z");
    CHECK(parse_iso8601("2020-03-01T12:30:45+01:00") == 1583065845 - 3600);
    CHECK(parse_iso8601(format_iso8601(1700000000)) == 1700000000);
    CHECK_THROWS_AS(parse_iso8601("not a date"), ParseError);
}

TEST_CASE("select_repositories applies the thresholds") {
    // commits is strict (>), the others inclusive (>=).
    CHECK(select_repositories({meta(101, 10, 50, 10)}).size() == 1);
    CHECK(select_repositories({meta(100, 10, 50, 10)}).empty());
    CHECK(select_repositories({meta(101, 9, 50, 10)}).empty());
    CHECK(select_repositories({meta(101, 10, 49, 10)}).empty());
    CHECK(select_repositories({meta(101, 10, 50, 9)}).empty());
    CHECK(select_repositories({}).empty());
}

TEST_CASE("select_repositories is monotone in its thresholds") {
    const std::vector<RepoMeta> candidates = {
        meta(101, 10, 50, 10), meta(500, 30, 80, 12), meta(120, 11, 51, 10),
        meta(99, 40, 90, 50),  meta(150, 10, 50, 10),
    };
    const auto base = select_repositories(candidates);
    for (long tighter : {11L, 20L, 60L}) {
        CHECK(select_repositories(candidates, 100, tighter).size() <= base.size());
        CHECK(select_repositories(candidates, 100, 10, tighter).size() <= base.size());
    }
}

TEST_CASE("open_issues_at boundaries") {
    const auto issues = std::vector<IssueRecord>{
        issue(1, 1000, 2000), issue(2, 1000), issue(3, 1500, 1600)};
    auto at = [&](UtcSeconds t) {
        std::vector<long> ids;
        for (const auto& i : open_issues_at(issues, t)) ids.push_back(i.id);
        return ids;
    };
    CHECK(at(1100) == std::vector<long>{1, 2});
    // Close is exclusive: an issue closed exactly at t is no longer open.
    CHECK(at(2000) == std::vector<long>{2});
    CHECK(at(1999) == std::vector<long>{1, 2});
    CHECK(at(999).empty());
    // Subset property plus stability over event-free windows.
    CHECK(at(1700) == at(1999));
}

TEST_CASE("link_commit_to_issue reference forms") {
    const auto open = std::vector<IssueRecord>{issue(134, 0), issue(7, 0)};
    CHECK(link_commit_to_issue("fixed issue #134", open) == 134);
    CHECK(link_commit_to_issue("working on issues/134", open) == 134);
    CHECK(link_commit_to_issue("update readme", open) == std::nullopt);
    // First occurring reference wins.
    CHECK(link_commit_to_issue("see #7 then #134", open) == 7);
    // Maximal digit runs: #1345 is not a reference to 134.
    CHECK(link_commit_to_issue("see #1345", open) == std::nullopt);
    // A closed (non-open) issue does not link.
    CHECK(link_commit_to_issue("fix #99", open) == std::nullopt);
}

TEST_CASE("issue export round-trips") {
    std::vector<IssueRecord> issues = {issue(1, 1000, 2000), issue(2, 5000)};
    issues[0].body = "body text\nwith newline";
    issues[1].url = "https://example.test/issues/2";
    const auto path = std::filesystem::temp_directory_path() / "ctxmine_issues_test.json";
    save_issue_export(issues, path);
    const auto loaded = load_issue_export(path);
    REQUIRE(loaded.size() == 2);
    CHECK(loaded[0].id == 1);
    CHECK(loaded[0].body == issues[0].body);
    CHECK(loaded[0].closed_at == issues[0].closed_at);
    CHECK(loaded[1].closed_at == std::nullopt);
    CHECK(loaded[1].url == issues[1].url);
    std::filesystem::remove(path);
}

TEST_CASE("sample_files filters test paths and is deterministic") {
    FixtureRepo fixture;
    fixture.write("src/Main.java", "class Main {}");
    fixture.write("src/Util.java", "class Util {}");
    fixture.write("src/test/FooTest.java", "class FooTest {}");
    fixture.write("src/TestHelper.java", "class TestHelper {}");
    fixture.write("src/latest/Keep.java", "class Keep {}");  // "latest" contains "test"
    fixture.write("docs/readme.md", "hi");

    const auto files = sample_files(fixture.path(), 1000, 1);
    std::vector<std::string> names;
    for (const auto& f : files) names.push_back(f.generic_string());
    CHECK(names == std::vector<std::string>{"src/Main.java", "src/Util.java"});

    // Capped sampling: deterministic for a fixed seed, different incidence
    // proves it actually samples.
    for (int i = 0; i < 30; ++i) {
        fixture.write("gen/F" + std::to_string(i) + ".java", "class F {}");
    }
    const auto a = sample_files(fixture.path(), 10, 99);
    const auto b = sample_files(fixture.path(), 10, 99);
    CHECK(a == b);
    CHECK(a.size() == 10);
    CHECK_THROWS_AS(sample_files(fixture.path() / "missing", 10, 1), IoError);
}

TEST_CASE("git log order, blame, and diffs on a scripted repository") {
    FixtureRepo fixture;
    fixture.write("src/A.java",
                  "class A {\n"
                  "    int f() {\n"
                  "        int a = 1;\n"
                  "        int b = 2;\n"
                  "        return a + b;\n"
                  "    }\n"
                  "}\n");
    const std::string c1 =
        fixture.commit("start", "Alice", "alice@example.com", "2020-01-01T10:00:00Z");
    fixture.write("src/A.java",
                  "class A {\n"
                  "    int f() {\n"
                  "        int a = 1;\n"
                  "        int b = 3;\n"
                  "        return a + b;\n"
                  "    }\n"
                  "}\n");
    const std::string c2 =
        fixture.commit("bump b", "Bob", "bob@example.com", "2020-02-01T10:00:00Z");
    fixture.write("README.md", "release notes");
    const std::string c3 =
        fixture.commit("release prep", "Alice", "alice@example.com", "2020-03-01T10:00:00Z");
    fixture.tag("v1");

    GitRepo git(fixture.path());
    const auto& log = git.log();
    REQUIRE(log.size() == 3);
    CHECK(log[0].commit.sha == c3);
    CHECK(log[1].commit.sha == c2);
    CHECK(log[2].commit.sha == c1);
    CHECK(log[1].commit.author_email == "bob@example.com");
    CHECK(log[1].commit.message == "bump b");
    CHECK(log[0].files == std::vector<std::string>{"README.md"});
    CHECK(git.order_of(c2) == 1);
    CHECK(git.order_of("0000000000000000000000000000000000000000") == std::nullopt);
    CHECK(git.resolve("v1") == c3);
    CHECK(git.commit_time(c1) == parse_iso8601("2020-01-01T10:00:00Z"));

    // Blame: line 4 (int b = 3) belongs to c2, lines 3 and 5 to c1.
    const auto shas = git.blame("src/A.java", c3, 3, 5);
    REQUIRE(shas.size() == 3);
    CHECK(shas[0] == c1);
    CHECK(shas[1] == c2);
    CHECK(shas[2] == c1);

    // Diff of c2: one deletion paired with one addition becomes Modified.
    const auto diff = git.diff_lines(c2);
    REQUIRE(diff.size() == 1);
    CHECK(diff[0].kind == DiffLine::Kind::Modified);
    CHECK(diff[0].text == "        int b = 3;");
    CHECK(diff[0].file_path == "src/A.java");
}

TEST_CASE("last_change_commit follows blame to the latest qualifying commit") {
    FixtureRepo fixture;
    fixture.write("A.java",
                  "class A {\n"
                  "    int f() {\n"
                  "        int a = 1;\n"
                  "        int b = 2;\n"
                  "        return a + b;\n"
                  "    }\n"
                  "    int g() {\n"
                  "        return 42;\n"
                  "    }\n"
                  "}\n");
    fixture.commit("start", "Alice", "alice@example.com", "2020-01-01T10:00:00Z");
    const std::string c1 = fixture.head();
    fixture.write("A.java",
                  "class A {\n"
                  "    int f() {\n"
                  "        int a = 1;\n"
                  "        int b = 3;\n"
                  "        return a + b;\n"
                  "    }\n"
                  "    int g() {\n"
                  "        return 42;\n"
                  "    }\n"
                  "}\n");
    const std::string c2 =
        fixture.commit("bump b", "Bob", "bob@example.com", "2020-02-01T10:00:00Z");
    fixture.write("README.md", "notes");
    const std::string c3 =
        fixture.commit("release", "Alice", "alice@example.com", "2020-03-01T10:00:00Z");

    GitRepo git(fixture.path());
    ReleaseRef release{"v1", c3, git.commit_time(c3)};

    std::ifstream in(fixture.path() / "A.java");
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto methods = ctxmine::code::extract_methods(content, "A.java");
    REQUIRE(methods.size() == 2);

    // f: c2 touched exactly statement 1 and is the latest before the release.
    const auto change_f = last_change_commit(methods[0], release, git, "A.java");
    REQUIRE(change_f.has_value());
    CHECK(change_f->commit.sha == c2);
    CHECK(change_f->statement_indices == std::set<int>{1});

    // g: fully authored in c1, so every statement belongs to it.
    const auto change_g = last_change_commit(methods[1], release, git, "A.java");
    REQUIRE(change_g.has_value());
    CHECK(change_g->commit.sha == c1);
    CHECK(change_g->statement_indices == std::set<int>{0});
    CHECK(change_g->commit.timestamp < release.date);
}

TEST_CASE("developer_history filters by author, order, and file type") {
    FixtureRepo fixture;
    fixture.write("a.java", "class A0 {}");
    fixture.commit("alice 1", "Alice", "alice@example.com", "2020-01-01T10:00:00Z");
    fixture.write("a.java", "class A1 {}");
    fixture.commit("alice 2", "Alice", "ALICE@example.com", "2020-01-02T10:00:00Z");
    fixture.write("notes.md", "md only");
    fixture.commit("alice md", "Alice", "alice@example.com", "2020-01-03T10:00:00Z");
    fixture.write("b.java", "class B {}");
    fixture.commit("bob 1", "Bob", "bob@example.com", "2020-01-04T10:00:00Z");
    fixture.write("a.java", "class A2 {}");
    const std::string before_sha =
        fixture.commit("alice 3", "Alice", "alice@example.com", "2020-01-05T10:00:00Z");

    GitRepo git(fixture.path());
    const auto& log = git.log();
    const auto before = log[0].commit;
    REQUIRE(before.sha == before_sha);

    // Email matching is case-insensitive; the markdown-only commit is skipped.
    const auto history = developer_history("Alice", "alice@example.com", before, git, 10);
    REQUIRE(history.size() == 2);
    CHECK(history[0].message == "alice 2");
    CHECK(history[1].message == "alice 1");
    CHECK_FALSE(history[0].diff.empty());

    const auto limited = developer_history("Alice", "alice@example.com", before, git, 1);
    REQUIRE(limited.size() == 1);
    CHECK(limited[0].message == "alice 2");

    const auto none = developer_history("Carol", "carol@example.com", before, git, 10);
    CHECK(none.empty());
}
