#pragma once

// Binary ensemble files: a grid header followed by one frame per path holding
// the increments and an FNV-1a checksum of their bytes. All integers and
// doubles are written little-endian in host layout.

#include "liebm/lie.hpp"
#include "liebm/pathspace.hpp"

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace liebm {

class EnsembleFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct EnsembleHeader {
    std::string group;  // LieGroup::name()
    int dim = 0;
    TimeGrid grid;
    std::uint64_t seed = 0;
    std::uint64_t paths = 0;
    std::string generator;
};

/// FNV-1a over the raw bytes of the increments.
std::uint64_t path_checksum(const AlgebraPath& w);

class EnsembleWriter {
public:
    EnsembleWriter(const std::string& file, const EnsembleHeader& header);
    void write(std::uint64_t index, const AlgebraPath& w);
    /// Flushes and returns the ensemble digest (hash of header and frame checksums in order).
    std::string finish();

private:
    std::ofstream out_;
    EnsembleHeader header_;
    std::uint64_t written_ = 0;
    std::uint64_t digest_;
};

struct EnsembleFrame {
    std::uint64_t index = 0;
    AlgebraPath path;
    std::uint64_t checksum = 0;
    bool valid = false;  // stored checksum matches the data
};

class EnsembleReader {
public:
    explicit EnsembleReader(const std::string& file);
    const EnsembleHeader& header() const { return header_; }
    /// False at end of file.
    bool next(EnsembleFrame& frame);

private:
    std::ifstream in_;
    EnsembleHeader header_;
    std::uint64_t read_ = 0;
};

struct EnsembleSummary {
    std::string file;
    std::string digest;
    std::uint64_t paths = 0;
    std::uint64_t bad_frames = 0;
};

/// Samples `paths` Brownian paths in g with NoiseStream{seed, i} and writes them.
EnsembleSummary simulate_ensemble(const std::string& file, const LieGroup& group, const TimeGrid& grid,
                                  std::uint64_t paths, std::uint64_t seed);

/// Re-reads a file, checks every frame and recomputes the digest.
EnsembleSummary audit_ensemble(const std::string& file);

/// CSV with a grid header line and one row per node: t, w_1..w_d.
std::string path_to_csv(const AlgebraPath& w);

}  // namespace liebm
