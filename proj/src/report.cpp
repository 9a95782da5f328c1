#include "plastokh/report.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "plastokh/errors.hpp"

namespace plastokh {

void RunReport::add_stage(const std::string& name, double residual, long iterations,
                          double seconds) {
    stages.push_back({name, residual, iterations, seconds});
}

void RunReport::add_check(const std::string& name, bool pass, double value, double budget,
                          const std::string& note) {
    checks.push_back({name, pass, value, budget, note});
}

bool RunReport::all_passed() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

std::string RunReport::to_json() const {
    nlohmann::json j;
    j["command"] = command;
    j["seed"] = seed;
    j["config"] = config_text;
    j["stages"] = nlohmann::json::array();
    for (const auto& s : stages)
        j["stages"].push_back({{"name", s.name},
                               {"residual", s.residual},
                               {"iterations", s.iterations},
                               {"seconds", s.seconds}});
    j["checks"] = nlohmann::json::array();
    for (const auto& c : checks)
        j["checks"].push_back({{"name", c.name},
                               {"pass", c.pass},
                               {"value", c.value},
                               {"budget", c.budget},
                               {"note", c.note}});
    j["all_passed"] = all_passed();
    return j.dump(2) + "\n";
}

std::string RunReport::to_log() const {
    std::ostringstream o;
    o << "command: " << command << "\nseed: " << seed << "\n";
    for (const auto& s : stages)
        o << "stage " << s.name << ": residual=" << s.residual
          << " iterations=" << s.iterations << " seconds=" << s.seconds << "\n";
    for (const auto& c : checks)
        o << "check " << c.name << ": " << (c.pass ? "pass" : "FAIL")
          << " value=" << c.value << " budget=" << c.budget
          << (c.note.empty() ? "" : " (" + c.note + ")") << "\n";
    return o.str();
}

void RunReport::write(const std::string& dir) const {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    const auto dump = [&](const std::string& name, const std::string& body) {
        std::ofstream out(dir + "/" + name, std::ios::binary);
        if (!out) throw IoError("cannot write " + dir + "/" + name);
        out << body;
    };
    dump("report.json", to_json());
    dump("run.log", to_log());
}

} // namespace plastokh
