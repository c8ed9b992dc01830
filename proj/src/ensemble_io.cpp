#include "liebm/ensemble_io.hpp"

#include "liebm/flow.hpp"
#include "liebm/report.hpp"

#include <iomanip>
#include <sstream>
#include <string_view>

namespace liebm {

namespace {

constexpr char kMagic[8] = {'L', 'I', 'E', 'B', 'M', 'E', 'N', 'S'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw EnsembleFormatError("truncated ensemble file");
    return v;
}

void put_string(std::ostream& out, const std::string& s) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& in) {
    auto n = get<std::uint32_t>(in);
    if (n > 4096) throw EnsembleFormatError("header string too long");
    std::string s(n, '\0');
    in.read(s.data(), n);
    if (!in) throw EnsembleFormatError("truncated ensemble file");
    return s;
}

std::string header_bytes(const EnsembleHeader& h) {
    std::ostringstream os;
    os << h.group << '|' << h.dim << '|' << std::setprecision(17) << h.grid.horizon << '|' << h.grid.steps << '|'
       << h.seed << '|' << h.paths << '|' << h.generator;
    return os.str();
}

std::uint64_t fold(std::uint64_t digest, std::uint64_t value) {
    return fnv1a(std::string_view(reinterpret_cast<const char*>(&value), sizeof value), digest);
}

std::string hex(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

std::vector<double> flat_increments(const AlgebraPath& w) {
    std::vector<double> out;
    for (int k = 0; k < w.grid.steps; ++k) {
        AlgebraVector dw = w.increment(k);
        out.insert(out.end(), dw.data(), dw.data() + dw.size());
    }
    return out;
}

std::uint64_t bytes_checksum(const std::vector<double>& flat) {
    return fnv1a(std::string_view(reinterpret_cast<const char*>(flat.data()), flat.size() * sizeof(double)));
}

}  // namespace

std::uint64_t path_checksum(const AlgebraPath& w) { return bytes_checksum(flat_increments(w)); }

EnsembleWriter::EnsembleWriter(const std::string& file, const EnsembleHeader& header)
    : out_(file, std::ios::binary | std::ios::trunc), header_(header) {
    if (!out_) throw std::runtime_error("cannot open " + file + " for writing");
    out_.write(kMagic, sizeof kMagic);
    put(out_, kVersion);
    put_string(out_, header.group);
    put<std::int32_t>(out_, header.dim);
    put(out_, header.grid.horizon);
    put<std::int32_t>(out_, header.grid.steps);
    put(out_, header.seed);
    put(out_, header.paths);
    put_string(out_, header.generator);
    digest_ = fnv1a(header_bytes(header));
}

void EnsembleWriter::write(std::uint64_t index, const AlgebraPath& w) {
    require_same_grid(w.grid, header_.grid);
    if (written_ >= header_.paths) throw std::logic_error("more frames than declared");
    std::vector<double> flat = flat_increments(w);
    if (flat.size() != static_cast<size_t>(header_.dim) * header_.grid.steps)
        throw std::invalid_argument("path dimension does not match header");
    std::uint64_t sum = bytes_checksum(flat);
    put(out_, index);
    out_.write(reinterpret_cast<const char*>(flat.data()), static_cast<std::streamsize>(flat.size() * sizeof(double)));
    put(out_, sum);
    digest_ = fold(digest_, sum);
    ++written_;
}

std::string EnsembleWriter::finish() {
    if (written_ != header_.paths) throw std::logic_error("fewer frames than declared");
    out_.flush();
    if (!out_) throw std::runtime_error("write failed");
    out_.close();
    return hex(digest_);
}

EnsembleReader::EnsembleReader(const std::string& file) : in_(file, std::ios::binary) {
    if (!in_) throw std::runtime_error("cannot open " + file);
    char magic[8];
    in_.read(magic, sizeof magic);
    if (!in_ || std::string_view(magic, 8) != std::string_view(kMagic, 8))
        throw EnsembleFormatError("not an ensemble file");
    if (get<std::uint32_t>(in_) != kVersion) throw EnsembleFormatError("unsupported ensemble version");
    header_.group = get_string(in_);
    header_.dim = get<std::int32_t>(in_);
    double horizon = get<double>(in_);
    int steps = get<std::int32_t>(in_);
    if (header_.dim <= 0 || steps <= 0 || !(horizon > 0)) throw EnsembleFormatError("invalid ensemble header");
    header_.grid = TimeGrid(horizon, steps);
    header_.seed = get<std::uint64_t>(in_);
    header_.paths = get<std::uint64_t>(in_);
    header_.generator = get_string(in_);
}

bool EnsembleReader::next(EnsembleFrame& frame) {
    if (read_ == header_.paths) return false;
    frame.index = get<std::uint64_t>(in_);
    std::vector<double> flat(static_cast<size_t>(header_.dim) * header_.grid.steps);
    in_.read(reinterpret_cast<char*>(flat.data()), static_cast<std::streamsize>(flat.size() * sizeof(double)));
    if (!in_) throw EnsembleFormatError("truncated ensemble file");
    frame.checksum = get<std::uint64_t>(in_);
    frame.valid = bytes_checksum(flat) == frame.checksum;
    std::vector<AlgebraVector> inc;
    inc.reserve(header_.grid.steps);
    for (int k = 0; k < header_.grid.steps; ++k)
        inc.push_back(Eigen::Map<const AlgebraVector>(flat.data() + static_cast<size_t>(k) * header_.dim, header_.dim));
    frame.path = AlgebraPath::from_increments(header_.grid, inc);
    ++read_;
    return true;
}

EnsembleSummary simulate_ensemble(const std::string& file, const LieGroup& group, const TimeGrid& grid,
                                  std::uint64_t paths, std::uint64_t seed) {
    if (paths == 0) throw std::invalid_argument("ensemble needs at least one path");
    EnsembleHeader h{group.name(), group.dim(), grid, seed, paths, NoiseStream::kGenerator};
    EnsembleWriter writer(file, h);
    for (std::uint64_t i = 0; i < paths; ++i) writer.write(i, sample_bm(group, grid, NoiseStream{seed, i}));
    return {file, writer.finish(), paths, 0};
}

EnsembleSummary audit_ensemble(const std::string& file) {
    EnsembleReader reader(file);
    EnsembleSummary s{file, "", 0, 0};
    std::uint64_t digest = fnv1a(header_bytes(reader.header()));
    EnsembleFrame frame;
    while (reader.next(frame)) {
        ++s.paths;
        if (!frame.valid) ++s.bad_frames;
        digest = fold(digest, path_checksum(frame.path));
    }
    s.digest = hex(digest);
    return s;
}

std::string path_to_csv(const AlgebraPath& w) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "# horizon=" << w.grid.horizon << " steps=" << w.grid.steps << "\n";
    os << "t";
    for (int i = 0; i < static_cast<int>(w.values.front().size()); ++i) os << ",w" << i + 1;
    os << "\n";
    for (int k = 0; k <= w.grid.steps; ++k) {
        os << w.grid.node(k);
        for (int i = 0; i < w.values[k].size(); ++i) os << ',' << w.values[k][i];
        os << "\n";
    }
    return os.str();
}

}  // namespace liebm
