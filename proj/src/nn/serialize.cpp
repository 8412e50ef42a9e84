#include "gridrl/nn/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace gridrl::nn {

namespace {

NetworkConfig read_manifest(std::istream& in) {
    std::string magic;
    int version = 0;
    in >> magic >> version;
    if (magic != "gridrl-net" || version != 1)
        throw Error("checkpoint: bad magic or version");

    NetworkConfig cfg;
    cfg.hidden.clear();
    std::string line;
    std::getline(in, line);  // rest of magic line
    std::getline(in, line);
    std::istringstream ls(line);
    std::string key;
    int dueling = 0, noisy = 0;
    ls >> key >> cfg.input_size;
    if (key != "input") throw Error("checkpoint: malformed manifest");
    ls >> key >> cfg.actions >> key >> cfg.atoms >> key >> dueling >> key >> noisy >> key;
    if (key != "hidden") throw Error("checkpoint: malformed manifest");
    int h;
    while (ls >> h) cfg.hidden.push_back(h);
    cfg.dueling = dueling != 0;
    cfg.noisy = noisy != 0;
    return cfg;
}

}  // namespace

void save_params(Network& net, std::ostream& out) {
    const auto& cfg = net.config();
    out << "gridrl-net 1\n";
    out << "input " << cfg.input_size << " actions " << cfg.actions << " atoms " << cfg.atoms
        << " dueling " << (cfg.dueling ? 1 : 0) << " noisy " << (cfg.noisy ? 1 : 0) << " hidden";
    for (int h : cfg.hidden) out << ' ' << h;
    out << '\n';
    out << "params " << net.param_count() << '\n';
    char buf[48];
    net.visit_params([&](double& p) {
        std::snprintf(buf, sizeof(buf), "%a", p);
        out << buf << '\n';
    });
    if (!out) throw Error("checkpoint: write failure");
}

void save_params(Network& net, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("checkpoint: cannot open for write: " + path);
    save_params(net, out);
}

void load_params(Network& net, std::istream& in) {
    const NetworkConfig cfg = read_manifest(in);
    if (!(cfg == net.config()))
        throw Error("checkpoint: architecture mismatch against the target network");
    std::string key;
    std::size_t count = 0;
    in >> key >> count;
    if (key != "params" || count != net.param_count())
        throw Error("checkpoint: parameter count mismatch");
    std::string token;
    std::vector<double> flat;
    flat.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        if (!(in >> token)) throw Error("checkpoint: truncated parameter list");
        flat.push_back(std::strtod(token.c_str(), nullptr));
    }
    net.unflatten_params(flat);
}

void load_params(Network& net, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("checkpoint: cannot open: " + path);
    load_params(net, in);
}

NetworkConfig peek_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("checkpoint: cannot open: " + path);
    return read_manifest(in);
}

}  // namespace gridrl::nn
