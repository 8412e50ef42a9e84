#pragma once

#include <iosfwd>
#include <string>

#include "gridrl/nn/network.hpp"

namespace gridrl::nn {

/// Plain-text parameter checkpoint: a one-line shape manifest followed by
/// one hexfloat per parameter in visit order. Hexfloats round-trip doubles
/// exactly.
///
///   gridrl-net 1
///   input <n> actions <a> atoms <k> dueling <0|1> noisy <0|1> hidden <h...>
///   params <count>
///   <value>
///   ...
void save_params(Network& net, std::ostream& out);
void save_params(Network& net, const std::string& path);

/// Loads a checkpoint into an existing network. The manifest must match the
/// network's architecture exactly.
void load_params(Network& net, std::istream& in);
void load_params(Network& net, const std::string& path);

/// Reads only the manifest, for rebuilding a network before loading.
NetworkConfig peek_config(const std::string& path);

}  // namespace gridrl::nn
