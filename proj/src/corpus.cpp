#include "textile/corpus.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>

#include "textile/parallel.hpp"

namespace textile {

namespace fs = std::filesystem;

CsvError::CsvError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what) {}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream stream(line);
    while (std::getline(stream, field, ',')) {
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        fields.emplace_back();
    }
    return fields;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
}

template <typename T>
T parse_number(const std::string& text, std::size_t line) {
    T value{};
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) {
        throw CsvError(line, "not a number: '" + text + "'");
    }
    return value;
}

void check_field(const std::string& text, const char* what) {
    if (text.find_first_of(",\n\r") != std::string::npos) {
        throw std::invalid_argument(std::string(what) + " contains a comma or newline: '" + text + "'");
    }
}

}  // namespace

std::vector<ManifestRow> read_manifest(const std::string& file) {
    std::ifstream in(file);
    if (!in) {
        throw std::runtime_error("cannot open manifest " + file);
    }
    std::vector<ManifestRow> rows;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        strip_cr(line);
        if (number == 1) {
            if (line != "path,label") {
                throw CsvError(number, "manifest header must be 'path,label'");
            }
            continue;
        }
        if (line.empty()) {
            continue;
        }
        const auto fields = split(line);
        if (fields.size() != 2 || fields[0].empty()) {
            throw CsvError(number, "expected 'path,label'");
        }
        rows.push_back({fields[0], fields[1]});
    }
    if (number == 0) {
        throw CsvError(1, "empty manifest");
    }
    return rows;
}

Corpus load_corpus(const std::string& path) {
    Corpus corpus;
    fs::path manifest;
    if (fs::is_directory(path)) {
        if (fs::exists(fs::path(path) / "manifest.csv")) {
            manifest = fs::path(path) / "manifest.csv";
        } else {
            std::vector<fs::path> files;
            for (const auto& entry : fs::directory_iterator(path)) {
                if (entry.is_regular_file() && entry.path().extension() == ".tg1") {
                    files.push_back(entry.path());
                }
            }
            std::sort(files.begin(), files.end());
            for (const auto& file : files) {
                TextileGraph g = read_graph_file(file.string());
                corpus.ids.push_back(file.stem().string());
                corpus.labels.push_back(g.label().value_or(""));
                corpus.graphs.push_back(std::move(g));
            }
            return corpus;
        }
    } else if (fs::is_regular_file(path)) {
        manifest = path;
    } else {
        throw std::runtime_error("no corpus at " + path);
    }
    const fs::path base = manifest.parent_path();
    for (const auto& row : read_manifest(manifest.string())) {
        const fs::path file = fs::path(row.path).is_absolute() ? fs::path(row.path) : base / row.path;
        corpus.ids.push_back(fs::path(row.path).stem().string());
        corpus.labels.push_back(row.label);
        corpus.graphs.push_back(read_graph_file(file.string()));
    }
    return corpus;
}

FingerprintSet fingerprint_corpus(std::span<const TextileGraph> graphs, int k, unsigned jobs) {
    FingerprintSet set;
    set.k = k;
    set.fingerprints.assign(graphs.size(), Fingerprint(k));
    parallel_for(graphs.size(), jobs, [&](std::size_t i) { set.fingerprints[i] = fingerprint(graphs[i], k); });
    set.vectors.reserve(graphs.size());
    for (const auto& fp : set.fingerprints) {
        set.vectors.push_back(to_sparse(fp, set.vocabulary));
    }
    if (!set.vectors.empty()) {
        set.stats = corpus_stats(set.vectors);
    }
    return set;
}

std::string format_double(double value) {
    std::array<char, 32> buffer{};
    const auto [ptr, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
    return std::string(buffer.data(), ptr);
}

std::string corpus_hash(const Corpus& corpus) {
    std::uint64_t h = 14695981039346656037ULL;
    auto feed = [&h](std::string_view bytes) {
        for (const char ch : bytes) {
            h ^= static_cast<unsigned char>(ch);
            h *= 1099511628211ULL;
        }
    };
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        feed(corpus.ids[i]);
        feed("\n");
        feed(serialize(corpus.graphs[i]));
    }
    std::array<char, 17> hex{};
    std::snprintf(hex.data(), hex.size(), "%016llx", static_cast<unsigned long long>(h));
    return hex.data();
}

void write_fingerprint_csv(std::ostream& out, std::span<const std::string> ids,
                           std::span<const Fingerprint> fingerprints) {
    if (ids.size() != fingerprints.size()) {
        throw std::invalid_argument("one id per fingerprint required");
    }
    out << "graph_id,neighbourhood_code,count\n";
    for (std::size_t i = 0; i < ids.size(); ++i) {
        check_field(ids[i], "graph id");
        for (const auto& [nb, count] : fingerprints[i].counts()) {
            out << ids[i] << ',' << nb.code() << ',' << count << '\n';
        }
    }
}

void write_matrix_csv(std::ostream& out, const DistanceMatrix& matrix, const std::string& hash) {
    out << "# measure=" << measure_name(matrix.measure()) << " k=" << matrix.k() << " n=" << matrix.size()
        << " corpus=" << hash << '\n';
    out << "i,j,distance\n";
    for (std::size_t i = 0; i < matrix.size(); ++i) {
        for (std::size_t j = i + 1; j < matrix.size(); ++j) {
            out << i << ',' << j << ',' << format_double(matrix(i, j)) << '\n';
        }
    }
}

MatrixFile read_matrix_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw CsvError(1, "empty matrix file");
    }
    strip_cr(line);
    std::istringstream header(line);
    std::string hash_mark;
    header >> hash_mark;
    if (hash_mark != "#") {
        throw CsvError(1, "missing matrix header");
    }
    std::string measure;
    std::string hash;
    std::optional<int> k;
    std::optional<std::size_t> n;
    std::string item;
    while (header >> item) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw CsvError(1, "malformed header field '" + item + "'");
        }
        const std::string key = item.substr(0, eq);
        const std::string value = item.substr(eq + 1);
        if (key == "measure") {
            measure = value;
        } else if (key == "k") {
            k = parse_number<int>(value, 1);
        } else if (key == "n") {
            n = parse_number<std::size_t>(value, 1);
        } else if (key == "corpus") {
            hash = value;
        }
    }
    if (measure.empty() || !k || !n) {
        throw CsvError(1, "header needs measure, k and n");
    }
    MatrixFile file{DistanceMatrix(*n, parse_measure(measure), *k), hash};
    std::size_t number = 1;
    std::size_t filled = 0;
    while (std::getline(in, line)) {
        ++number;
        strip_cr(line);
        if (number == 2) {
            if (line != "i,j,distance") {
                throw CsvError(number, "expected 'i,j,distance'");
            }
            continue;
        }
        if (line.empty()) {
            continue;
        }
        const auto fields = split(line);
        if (fields.size() != 3) {
            throw CsvError(number, "expected three fields");
        }
        const auto i = parse_number<std::size_t>(fields[0], number);
        const auto j = parse_number<std::size_t>(fields[1], number);
        if (i >= j || j >= *n) {
            throw CsvError(number, "pair index out of range");
        }
        file.matrix.set(i, j, parse_number<double>(fields[2], number));
        ++filled;
    }
    if (filled != *n * (*n - (*n > 0)) / 2) {
        throw CsvError(number, "matrix has " + std::to_string(filled) + " entries, expected " +
                                   std::to_string(*n * (*n - (*n > 0)) / 2));
    }
    return file;
}

void write_assignments_csv(std::ostream& out, std::span<const std::string> ids, const Clustering& clustering) {
    const auto assignment = clustering.assignment();
    if (assignment.size() != ids.size()) {
        throw std::invalid_argument("clustering does not cover the corpus");
    }
    out << "item_id,cluster_id\n";
    for (std::size_t i = 0; i < ids.size(); ++i) {
        check_field(ids[i], "item id");
        out << ids[i] << ',' << assignment[i] << '\n';
    }
}

std::vector<Assignment> read_assignments_csv(std::istream& in) {
    std::vector<Assignment> rows;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        strip_cr(line);
        if (number == 1) {
            if (line != "item_id,cluster_id") {
                throw CsvError(number, "expected 'item_id,cluster_id'");
            }
            continue;
        }
        if (line.empty()) {
            continue;
        }
        const auto fields = split(line);
        if (fields.size() != 2) {
            throw CsvError(number, "expected two fields");
        }
        rows.push_back({fields[0], parse_number<std::size_t>(fields[1], number)});
    }
    if (number == 0) {
        throw CsvError(1, "empty assignments file");
    }
    return rows;
}

}  // namespace textile
