#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "mutbif/params.hpp"

namespace mutbif {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    size_t e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

} // namespace

ModelParams load_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    ModelParams p;
    std::map<std::string, double*> keys = {
        {"m1", &p.growth.m1},         {"K1", &p.growth.K1},
        {"L1", &p.growth.L1},         {"m2", &p.growth.m2},
        {"K2", &p.growth.K2},         {"L2", &p.growth.L2},
        {"alpha1", &p.removal.alpha1}, {"alpha2", &p.removal.alpha2},
        {"a1", &p.removal.a1},        {"a2", &p.removal.a2},
        {"S_in", &p.operating.S_in},  {"D", &p.operating.D},
    };
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') continue; // table headers carry no keys here
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        auto it = keys.find(key);
        if (it == keys.end())
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
        size_t pos = 0;
        double v = std::stod(val, &pos);
        if (pos != val.size())
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad number '" + val + "'");
        *it->second = v;
    }
    p.validate();
    return p;
}

void save_params(const ModelParams& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write config: " + path);
    out.precision(17);
    out << "m1 = " << p.growth.m1 << "\nK1 = " << p.growth.K1 << "\nL1 = " << p.growth.L1
        << "\nm2 = " << p.growth.m2 << "\nK2 = " << p.growth.K2 << "\nL2 = " << p.growth.L2
        << "\nalpha1 = " << p.removal.alpha1 << "\nalpha2 = " << p.removal.alpha2
        << "\na1 = " << p.removal.a1 << "\na2 = " << p.removal.a2
        << "\nS_in = " << p.operating.S_in << "\nD = " << p.operating.D << "\n";
}

} // namespace mutbif
