#include "fixture_repo.hpp"

#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include "ctxmine/process.hpp"

namespace {

void run_or_die(const std::vector<std::string>& argv) {
    const auto result = ctxmine::run_process(argv);
    if (result.exit_code != 0) {
        throw std::runtime_error("fixture command failed: " + argv[0] + " ... " + result.err);
    }
}

}  // namespace

FixtureRepo::FixtureRepo() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "ctxmine_fixture_XXXXXX").string();
    if (mkdtemp(tmpl.data()) == nullptr) {
        throw std::runtime_error("mkdtemp failed");
    }
    root_ = tmpl;
    run_or_die({"git", "-C", root_.string(), "init", "-q", "-b", "main"});
    run_or_die({"git", "-C", root_.string(), "config", "user.name", "fixture"});
    run_or_die({"git", "-C", root_.string(), "config", "user.email", "fixture@example.com"});
    run_or_die({"git", "-C", root_.string(), "config", "commit.gpgsign", "false"});
}

FixtureRepo::~FixtureRepo() {
    std::error_code ec;
    std::filesystem::remove_all(root_, ec);
}

void FixtureRepo::write(const std::string& relative, const std::string& content) {
    const auto full = root_ / relative;
    std::filesystem::create_directories(full.parent_path());
    std::ofstream out(full);
    out << content;
}

void FixtureRepo::remove_file(const std::string& relative) {
    std::filesystem::remove(root_ / relative);
}

std::string FixtureRepo::commit(const std::string& message, const std::string& author_name,
                                const std::string& author_email, const std::string& iso_date) {
    run_or_die({"git", "-C", root_.string(), "add", "-A"});
    // Committer date comes from the environment; author date from --date.
    run_or_die({"env", "GIT_COMMITTER_DATE=" + iso_date,
                "GIT_COMMITTER_NAME=" + author_name, "GIT_COMMITTER_EMAIL=" + author_email,
                "git", "-C", root_.string(), "commit", "-q", "--allow-empty", "-m", message,
                "--date=" + iso_date,
                "--author=" + author_name + " <" + author_email + ">"});
    return head();
}

void FixtureRepo::tag(const std::string& name) {
    run_or_die({"git", "-C", root_.string(), "tag", name});
}

std::string FixtureRepo::head() const {
    auto result = ctxmine::run_process({"git", "-C", root_.string(), "rev-parse", "HEAD"});
    std::string sha = result.out;
    while (!sha.empty() && (sha.back() == '\n' || sha.back() == '\r')) sha.pop_back();
    return sha;
}
