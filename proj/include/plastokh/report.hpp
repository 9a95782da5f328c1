#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace plastokh {

struct StageRecord {
    std::string name;
    double residual = 0.0;
    long iterations = 0;
    double seconds = 0.0;
};

struct CheckRecord {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double budget = 0.0;
    std::string note;
};

/// Machine-readable run summary (report.json) plus a human log (run.log).
struct RunReport {
    std::string command;
    uint64_t seed = 0;
    std::string config_text;
    std::vector<StageRecord> stages;
    std::vector<CheckRecord> checks;

    void add_stage(const std::string& name, double residual, long iterations,
                   double seconds);
    void add_check(const std::string& name, bool pass, double value, double budget,
                   const std::string& note = "");
    bool all_passed() const;

    std::string to_json() const;
    std::string to_log() const;
    /// Writes report.json and run.log into dir (created if missing).
    void write(const std::string& dir) const;
};

} // namespace plastokh
