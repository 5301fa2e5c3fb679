#pragma once

#include <filesystem>
#include <string>

// Scripted git repository for tests: files are written, committed with fixed
// authors and fixed author+committer dates, and cleaned up on destruction.
class FixtureRepo {
public:
    FixtureRepo();
    ~FixtureRepo();
    FixtureRepo(const FixtureRepo&) = delete;
    FixtureRepo& operator=(const FixtureRepo&) = delete;

    const std::filesystem::path& path() const { return root_; }

    void write(const std::string& relative, const std::string& content);
    void remove_file(const std::string& relative);
    // Returns the new commit's sha.
    std::string commit(const std::string& message, const std::string& author_name,
                       const std::string& author_email, const std::string& iso_date);
    void tag(const std::string& name);
    std::string head() const;

private:
    std::filesystem::path root_;
};
