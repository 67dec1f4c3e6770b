#pragma once

#include "opsf/network.hpp"

#include <cstdint>
#include <optional>

namespace opsf {

struct CaseSpec {
    int copies = 1;
    std::uint64_t seed = 1;
    double risk_variance = 0.25;
    // Substituted for the bundled feeder when the real dataset is available.
    std::optional<Network> base;
};

// The bundled synthetic radial feeder: 71 nodes, 72 lines, 11 switched lines,
// one substation, internally radial blocks, and an abstract block graph with
// exactly 3 simple cycles. DG units sit at the open ends of the two boundary
// switches so single-copy cases mimic an interconnection to a larger system.
Network bundled_base_network();

// Boundary nodes used to chain copies together.
struct BoundaryStubs {
    NodeId out_stub; // joined to the next copy's in_stub
    NodeId in_stub;
};
BoundaryStubs bundled_base_stubs();

// Tiles `copies` prefixed copies of the base, joins consecutive copies with
// boundary switched lines, keeps exactly one substation (copy 1) and demotes
// the other copies' bulk-grid interfaces to DG units. Risks are sampled from
// the spec's seed.
Network build_multicopy_case(const CaseSpec& spec);

// Seeded risk profile: block risk uniform in [1, 10]; per-line risk normal
// around the block value with the given variance, clamped at 0; switches get
// zero risk. Stream split: one master stream yields one sub-stream seed per
// block (blocks in id order); the block stream yields the block risk and then
// one seed per internal line (lines in id order).
void sample_risk_profile(Network& net, const BlockPartition& part, std::uint64_t seed,
                         double variance = 0.25);

} // namespace opsf
