#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

#include "advdir/linalg.hpp"

namespace advdir {

// Which construction produced a direction. Serialized names are part of the
// CLI output format.
enum class Provenance { ThmSvm, ThmMulti, ThmConvex, Pgd, Random };

inline const char* provenance_name(Provenance p) {
    switch (p) {
        case Provenance::ThmSvm: return "max-margin";
        case Provenance::ThmMulti: return "ovr-pair";
        case Provenance::ThmConvex: return "convex-region";
        case Provenance::Pgd: return "pgd";
        case Provenance::Random: return "random";
    }
    throw std::invalid_argument("unknown provenance");
}

inline Provenance provenance_from_name(const std::string& name) {
    if (name == "max-margin") return Provenance::ThmSvm;
    if (name == "ovr-pair") return Provenance::ThmMulti;
    if (name == "convex-region") return Provenance::ThmConvex;
    if (name == "pgd") return Provenance::Pgd;
    if (name == "random") return Provenance::Random;
    throw std::invalid_argument("unknown provenance name: " + name);
}

// A direction in input space claimed to be adversarial for some family of
// classifiers. `note` records the construction parameters (source label,
// class pair, endpoint indices, ...) and `dataset_hash` pins the data the
// claim refers to.
struct AdversarialDirection {
    Vec v;
    Provenance provenance = Provenance::Random;
    std::uint64_t dataset_hash = 0;
    std::string note;
};

inline AdversarialDirection make_direction(Vec v, Provenance p,
                                           std::uint64_t dataset_hash,
                                           std::string note) {
    if (norm2(v) <= 0.0)
        throw std::invalid_argument("make_direction: zero direction vector");
    return AdversarialDirection{std::move(v), p, dataset_hash, std::move(note)};
}

}  // namespace advdir
