// Shared helpers for the test binaries.
#pragma once

#include "aquarius/cli.hpp"
#include "aquarius/pipeline.hpp"
#include "aquarius/simulator.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>

namespace testing_support {

namespace fs = std::filesystem;

/// A fresh directory removed on destruction.
class temp_dir {
public:
    temp_dir() {
        static std::atomic<int> counter{0};
        path_ = fs::temp_directory_path() /
                ("aquarius-test-" + std::to_string(::getpid()) + "-" +
                 std::to_string(counter++));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~temp_dir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    temp_dir(const temp_dir&) = delete;
    auto operator=(const temp_dir&) -> temp_dir& = delete;

    [[nodiscard]] auto path() const -> const fs::path& { return path_; }
    [[nodiscard]] auto operator/(std::string_view name) const -> fs::path { return path_ / name; }

private:
    fs::path path_;
};

inline void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << text;
}

inline auto read_text(const fs::path& p) -> std::string {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Ingests a bundle in studies, findings, reports order.
inline void load_bundle(aquarius::ingest::pipeline& p, const aquarius::sim::cohort_bundle& b) {
    for (const auto& s : b.studies) p.ingest(s);
    for (const auto& f : b.findings) p.ingest(f);
    for (const auto& r : b.reports) p.ingest(r);
}

inline void apply_script(aquarius::ingest::pipeline& p, const aquarius::sim::cohort_bundle& b) {
    for (const auto& a : b.script) p.adjudicate(a);
}

/// Fixed epoch-based clock so logs are reproducible.
inline auto fixed_clock() -> aquarius::ingest::pipeline::clock {
    return [] { return aquarius::timestamp::parse("2021-03-01T00:00:00Z"); };
}

struct cli_result {
    int code = 0;
    std::string out;
    std::string err;
};

inline auto run(const std::vector<std::string>& args) -> cli_result {
    std::ostringstream out;
    std::ostringstream err;
    const int code = aquarius::cli::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

}  // namespace testing_support
