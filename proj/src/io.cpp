#include "roughlsm/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "roughlsm/errors.hpp"

namespace roughlsm {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
  if (!os) throw FormatError("cannot write " + path.string());
  return os;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path.string());
  return is;
}

void put_le(std::ostream& os, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
  os.write(reinterpret_cast<const char*>(bytes), 8);
}

double get_le(const unsigned char* bytes) {
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = (bits << 8) | bytes[i];
  return std::bit_cast<double>(bits);
}

double parse_real(const std::map<std::string, std::string>& header, const std::string& key,
                  const std::string& file) {
  const auto it = header.find(key);
  if (it == header.end()) throw FormatError(file + ": missing header field '" + key + "'");
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw FormatError(file + ": bad value for '" + key + "': " + it->second);
  }
}

}  // namespace

void write_matrix(const NearFieldMatrix& m, const std::filesystem::path& path) {
  const auto n = m.entries.rows();
  if (m.entries.cols() != n || n != m.line.count()) throw DomainError("write_matrix: matrix must be N x N");
  std::ofstream os = open_out(path, true);
  os << "roughlsm-nearfield " << kMatrixFormatVersion << "\n"
     << "N " << n << "\n"
     << "a " << fmt(m.line.half_width()) << "\n"
     << "b " << fmt(m.line.height()) << "\n"
     << "kappa1 " << fmt(m.medium.kappa1()) << "\n"
     << "kappa2 " << fmt(m.medium.kappa2()) << "\n"
     << "variant " << to_string(m.variant) << "\n"
     << "delta " << fmt(m.noise_level) << "\n"
     << "seed " << (m.seed ? std::to_string(*m.seed) : "none") << "\n"
     << "profile_id " << (m.profile_id.empty() ? "-" : m.profile_id) << "\n"
     << "h " << fmt(m.cell_width) << "\n"
     << "gr_radius " << fmt(m.gr_radius) << "\n"
     << "END\n";
  for (Eigen::Index p = 0; p < n; ++p) {
    for (Eigen::Index q = 0; q < n; ++q) {
      put_le(os, m.entries(p, q).real());
      put_le(os, m.entries(p, q).imag());
    }
  }
  if (!os) throw FormatError("error writing " + path.string());
}

NearFieldMatrix read_matrix(const std::filesystem::path& path) {
  std::ifstream is = open_in(path);
  const std::string file = path.string();
  std::string line;
  if (!std::getline(is, line)) throw FormatError(file + ": empty file");
  {
    std::istringstream first(line);
    std::string magic;
    int version = 0;
    if (!(first >> magic >> version) || magic != "roughlsm-nearfield") {
      throw FormatError(file + ": not a near-field matrix file");
    }
    if (version != kMatrixFormatVersion) {
      throw FormatError(file + ": format version " + std::to_string(version) + " is not supported (expected " +
                        std::to_string(kMatrixFormatVersion) + ")");
    }
  }
  std::map<std::string, std::string> header;
  bool ended = false;
  while (std::getline(is, line)) {
    if (line == "END") {
      ended = true;
      break;
    }
    const auto space = line.find(' ');
    if (space == std::string::npos) throw FormatError(file + ": malformed header line '" + line + "'");
    header[line.substr(0, space)] = line.substr(space + 1);
  }
  if (!ended) throw FormatError(file + ": header is not terminated by END");

  const double n_real = parse_real(header, "N", file);
  if (!(n_real >= 2) || n_real != std::floor(n_real) || n_real > 1e6) throw FormatError(file + ": bad N");
  const int n = static_cast<int>(n_real);
  const auto variant_it = header.find("variant");
  if (variant_it == header.end()) throw FormatError(file + ": missing header field 'variant'");
  const auto seed_it = header.find("seed");
  const auto id_it = header.find("profile_id");

  NearFieldMatrix m{
      .entries = MatrixXcd(n, n),
      .line = MeasurementLine(parse_real(header, "a", file), parse_real(header, "b", file), n),
      .medium = Medium(parse_real(header, "kappa1", file), parse_real(header, "kappa2", file)),
      .variant = variant_from_string(variant_it->second),
  };
  m.noise_level = parse_real(header, "delta", file);
  if (seed_it != header.end() && seed_it->second != "none") {
    try {
      m.seed = std::stoull(seed_it->second);
    } catch (const std::exception&) {
      throw FormatError(file + ": bad seed " + seed_it->second);
    }
  }
  m.profile_id = (id_it == header.end() || id_it->second == "-") ? "" : id_it->second;
  m.cell_width = parse_real(header, "h", file);
  m.gr_radius = parse_real(header, "gr_radius", file);

  std::vector<unsigned char> data(static_cast<std::size_t>(n) * n * 16);
  is.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (is.gcount() != static_cast<std::streamsize>(data.size())) throw FormatError(file + ": truncated data block");
  if (is.peek() != std::char_traits<char>::eof()) throw FormatError(file + ": trailing bytes after data block");
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      const unsigned char* at = data.data() + (static_cast<std::size_t>(p) * n + q) * 16;
      m.entries(p, q) = Complex(get_le(at), get_le(at + 8));
    }
  }
  return m;
}

void write_matrix_csv(const NearFieldMatrix& m, const std::filesystem::path& path) {
  std::ofstream os = open_out(path);
  os << "p,q,re,im\n";
  for (Eigen::Index p = 0; p < m.entries.rows(); ++p) {
    for (Eigen::Index q = 0; q < m.entries.cols(); ++q) {
      os << p << ',' << q << ',' << fmt(m.entries(p, q).real()) << ',' << fmt(m.entries(p, q).imag()) << '\n';
    }
  }
}

void write_indicator(const IndicatorField& field, double cutoff, const std::filesystem::path& path) {
  const SamplingGrid& g = field.grid;
  std::ofstream os = open_out(path);
  os << "# roughlsm-indicator " << kIndicatorFormatVersion << "\n"
     << "# grid " << fmt(g.x_min()) << ' ' << fmt(g.x_max()) << ' ' << fmt(g.y_min()) << ' ' << fmt(g.y_max())
     << ' ' << fmt(g.hx()) << ' ' << fmt(g.hy()) << "\n"
     << "# alpha " << fmt(field.alpha) << "\n"
     << "# variant " << to_string(field.variant) << "\n"
     << "# cutoff " << fmt(cutoff) << "\n"
     << "x1,x2,nind,raw_norm\n";
  for (int k = 0; k < g.size(); ++k) {
    const Point z = g.point(k);
    os << fmt(z.x()) << ',' << fmt(z.y()) << ',' << fmt(field.values(k)) << ',' << fmt(field.raw_norms(k)) << '\n';
  }
}

IndicatorField read_indicator(const std::filesystem::path& path) {
  std::ifstream is = open_in(path);
  const std::string file = path.string();
  std::map<std::string, std::string> header;
  std::string line;
  while (std::getline(is, line) && line.starts_with("# ")) {
    const auto space = line.find(' ', 2);
    if (space == std::string::npos) throw FormatError(file + ": malformed header line '" + line + "'");
    header[line.substr(2, space - 2)] = line.substr(space + 1);
  }
  const auto version = header.find("roughlsm-indicator");
  if (version == header.end()) throw FormatError(file + ": not an indicator file");
  if (version->second != std::to_string(kIndicatorFormatVersion)) {
    throw FormatError(file + ": indicator format version " + version->second + " is not supported");
  }
  if (line != "x1,x2,nind,raw_norm") throw FormatError(file + ": missing column header");

  std::istringstream gs(header["grid"]);
  double x0, x1, y0, y1, hx, hy;
  if (!(gs >> x0 >> x1 >> y0 >> y1 >> hx >> hy)) throw FormatError(file + ": bad grid header");
  const SamplingGrid grid(x0, x1, y0, y1, hx, hy);
  IndicatorField field{grid, VectorXd(grid.size()), VectorXd(grid.size()), parse_real(header, "alpha", file),
                       variant_from_string(header["variant"])};
  for (int k = 0; k < grid.size(); ++k) {
    if (!std::getline(is, line)) throw FormatError(file + ": expected " + std::to_string(grid.size()) + " rows");
    std::array<double, 4> v{};
    std::istringstream row(line);
    std::string cell;
    for (double& x : v) {
      if (!std::getline(row, cell, ',')) throw FormatError(file + ": short row " + std::to_string(k));
      x = std::stod(cell);
    }
    field.values(k) = v[2];
    field.raw_norms(k) = v[3];
  }
  return field;
}

void write_heatmap(const IndicatorField& field, const std::filesystem::path& path) {
  const SamplingGrid& g = field.grid;
  std::ofstream os = open_out(path, true);
  os << "P5\n" << g.nx() << ' ' << g.ny() << "\n255\n";
  for (int j = g.ny() - 1; j >= 0; --j) {
    for (int i = 0; i < g.nx(); ++i) {
      const double v = std::clamp(field.at(i, j), 0.0, 1.0);
      os.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * v))));
    }
  }
  if (!os) throw FormatError("error writing " + path.string());
}

void write_overlay(const InterfaceEstimate& estimate, const InterfaceProfile* truth,
                   const std::filesystem::path& path) {
  std::ofstream os = open_out(path);
  os << "x1,estimate,truth\n";
  for (const ColumnEstimate& c : estimate.columns) {
    os << fmt(c.x1) << ',';
    if (c.envelope) os << fmt(*c.envelope);
    os << ',';
    if (truth) os << fmt(truth->evaluate(c.x1));
    os << '\n';
  }
}

}  // namespace roughlsm
