#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "textile/clustering.hpp"
#include "textile/distance.hpp"
#include "textile/fingerprint.hpp"
#include "textile/graph.hpp"

namespace textile {

/// Labelled graphs in manifest order.
struct Corpus {
    std::vector<std::string> ids;     ///< file stems
    std::vector<std::string> labels;  ///< category per item
    std::vector<TextileGraph> graphs;

    std::size_t size() const noexcept { return graphs.size(); }
};

struct ManifestRow {
    std::string path;
    std::string label;
};

/// Reads a `path,label` manifest. Relative paths stay as written.
std::vector<ManifestRow> read_manifest(const std::string& file);

/**
 * Loads a corpus from a manifest file, from a directory holding manifest.csv,
 * or from a directory of .tg1 files (sorted by name; labels from the LABEL
 * line, empty when absent). Relative manifest paths resolve against the
 * manifest's directory.
 */
Corpus load_corpus(const std::string& path);

/// Fingerprints of a corpus as vectors over one shared vocabulary.
struct FingerprintSet {
    int k = 0;
    std::vector<Fingerprint> fingerprints;
    Vocabulary vocabulary;
    std::vector<SparseVector> vectors;
    CorpusStats stats;
};

/// Keys are interned in item order, so the result does not depend on `jobs`.
FingerprintSet fingerprint_corpus(std::span<const TextileGraph> graphs, int k, unsigned jobs = 1);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

/// FNV-1a over ids and canonical TG1 text, rendered as 16 hex digits.
std::string corpus_hash(const Corpus& corpus);

/// `graph_id,neighbourhood_code,count`, neighbourhoods in canonical order.
void write_fingerprint_csv(std::ostream& out, std::span<const std::string> ids,
                           std::span<const Fingerprint> fingerprints);

/// Header line `# measure=<name> k=<k> n=<n> corpus=<hash>`, then `i,j,distance` for i < j.
void write_matrix_csv(std::ostream& out, const DistanceMatrix& matrix, const std::string& hash);

struct MatrixFile {
    DistanceMatrix matrix;
    std::string hash;
};
MatrixFile read_matrix_csv(std::istream& in);

/// `item_id,cluster_id` with clusters numbered from 0.
void write_assignments_csv(std::ostream& out, std::span<const std::string> ids, const Clustering& clustering);

struct Assignment {
    std::string item;
    std::size_t cluster;
};
std::vector<Assignment> read_assignments_csv(std::istream& in);

/// Raised for malformed CSV input; carries the 1-based line number.
class CsvError : public std::runtime_error {
public:
    CsvError(std::size_t line, const std::string& what);
};

}  // namespace textile
