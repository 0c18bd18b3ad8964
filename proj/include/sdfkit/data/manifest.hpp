#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "sdfkit/data/samples.hpp"

namespace sdfkit {

struct ManifestEntry {
    std::string id;
    std::string file;    // sample file; relative names resolve against the manifest dir
    std::string source;  // "mesh <path>" or an analytic descriptor like "sphere(0,0,0,0.5)"
    std::string split;   // "train" or "test"
    std::size_t count = 0;
    std::uint64_t seed = 0;  // sampling seed used for this shape
};

// Index of one generated dataset: where each shape's samples live, how they
// were produced, and the sampling configuration shared by all of them.
struct DatasetManifest {
    SamplingConfig sampling;
    std::vector<ManifestEntry> entries;
    std::uint64_t config_hash = 0;  // hash of the generating config text
    std::uint64_t seed = 0;         // dataset-level base seed

    const ManifestEntry* find(const std::string& id) const;
    std::vector<const ManifestEntry*> split_entries(const std::string& split) const;
    void validate() const;  // unique non-empty ids, known split tags
};

void save_manifest(const DatasetManifest& m, const std::string& path);

// Parses, validates, resolves each entry's file against the manifest's
// directory, and fails if any referenced sample file is missing.
DatasetManifest load_manifest(const std::string& path);

} // namespace sdfkit
