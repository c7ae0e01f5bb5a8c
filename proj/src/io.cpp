#include "waveop/io.hpp"

#include <openssl/evp.h>

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

static_assert(std::endian::native == std::endian::little,
              "snapshot formats are defined little-endian");

namespace waveop::io {

namespace {

constexpr char kMatrixMagic[4] = {'W', 'O', 'P', 'M'};
constexpr char kFieldMagic[4] = {'W', 'O', 'P', 'F'};
constexpr std::uint32_t kFormatVersion = 1;
constexpr char kDtypeTag[12] = "complex128\0";

template <class T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
void get(std::ifstream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open for reading: " + path);
  return in;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  q += '"';
  return q;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  // Trim to the shortest representation that still round-trips.
  for (int prec = 1; prec < 17; ++prec) {
    char probe[40];
    std::snprintf(probe, sizeof(probe), "%.*g", prec, v);
    if (std::strtod(probe, nullptr) == v) return probe;
  }
  return buf;
}

void write_matrix(const std::string& path, const Eigen::MatrixXcd& A) {
  if (A.rows() != A.cols())
    throw std::invalid_argument("matrix snapshot requires a square matrix");
  std::ofstream out = open_out(path);
  out.write(kMatrixMagic, 4);
  put(out, kFormatVersion);
  const std::uint64_t n = static_cast<std::uint64_t>(A.rows());
  put(out, n);
  out.write(kDtypeTag, sizeof(kDtypeTag));
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      const std::complex<double> v = A(i, j);
      put(out, v);
    }
  if (!out) throw ConfigError("write failed: " + path);
}

Eigen::MatrixXcd read_matrix(const std::string& path) {
  std::ifstream in = open_in(path);
  char magic[4];
  in.read(magic, 4);
  std::uint32_t version = 0;
  get(in, version);
  std::uint64_t n = 0;
  get(in, n);
  char dtype[sizeof(kDtypeTag)];
  in.read(dtype, sizeof(dtype));
  if (!in || std::memcmp(magic, kMatrixMagic, 4) != 0)
    throw ConfigError("not a matrix snapshot: " + path);
  if (version != kFormatVersion)
    throw ConfigError("unsupported matrix snapshot version in " + path);
  if (std::memcmp(dtype, kDtypeTag, sizeof(dtype)) != 0)
    throw ConfigError("unsupported matrix dtype in " + path);
  if (n == 0 || n > 100000)
    throw ConfigError("implausible matrix dimension in " + path);
  Eigen::MatrixXcd A(static_cast<Eigen::Index>(n),
                     static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      std::complex<double> v;
      get(in, v);
      A(i, j) = v;
    }
  if (!in) throw ConfigError("truncated matrix snapshot: " + path);
  return A;
}

void write_field(const std::string& path,
                 const phasespace::PhaseSpaceField& f) {
  if (f.values.rows() != f.grid.nx || f.values.cols() != f.grid.np)
    throw std::invalid_argument("field shape does not match its grid");
  std::ofstream out = open_out(path);
  out.write(kFieldMagic, 4);
  put(out, kFormatVersion);
  put(out, static_cast<std::uint32_t>(f.grid.nx));
  put(out, static_cast<std::uint32_t>(f.grid.np));
  put(out, f.grid.x_min);
  put(out, f.grid.x_max);
  put(out, f.grid.p_min);
  put(out, f.grid.p_max);
  put(out, f.hbar);
  out.write(reinterpret_cast<const char*>(f.values.data()),
            static_cast<std::streamsize>(sizeof(std::complex<double>) *
                                         static_cast<std::size_t>(
                                             f.values.size())));
  if (!out) throw ConfigError("write failed: " + path);
}

phasespace::PhaseSpaceField read_field(const std::string& path) {
  std::ifstream in = open_in(path);
  char magic[4];
  in.read(magic, 4);
  std::uint32_t version = 0, nx = 0, np = 0;
  get(in, version);
  get(in, nx);
  get(in, np);
  model::GridSpec grid;
  double hbar = 1.0;
  get(in, grid.x_min);
  get(in, grid.x_max);
  get(in, grid.p_min);
  get(in, grid.p_max);
  get(in, hbar);
  if (!in || std::memcmp(magic, kFieldMagic, 4) != 0)
    throw ConfigError("not a field snapshot: " + path);
  if (version != kFormatVersion)
    throw ConfigError("unsupported field snapshot version in " + path);
  if (nx < 2 || np < 2 || nx > 1000000 || np > 1000000)
    throw ConfigError("implausible field dimensions in " + path);
  grid.nx = static_cast<int>(nx);
  grid.np = static_cast<int>(np);
  phasespace::PhaseSpaceField f = phasespace::make_field(grid, hbar);
  in.read(reinterpret_cast<char*>(f.values.data()),
          static_cast<std::streamsize>(sizeof(std::complex<double>) *
                                       static_cast<std::size_t>(
                                           f.values.size())));
  if (!in) throw ConfigError("truncated field snapshot: " + path);
  return f;
}

std::string series_csv(
    const std::vector<const imagtime::ObservableSeries*>& series) {
  std::string out = "beta,energy,dx,dp,dxdp,norm_prerenorm,tier\n";
  for (const imagtime::ObservableSeries* s : series) {
    for (std::size_t r = 0; r < s->axis.size(); ++r) {
      out += format_double(s->axis[r]);
      out += ',';
      out += format_double(s->energy[r]);
      out += ',';
      out += format_double(s->dx[r]);
      out += ',';
      out += format_double(s->dp[r]);
      out += ',';
      out += format_double(s->dxdp[r]);
      out += ',';
      out += format_double(s->norm_prerenorm[r]);
      out += ',';
      out += csv_quote(s->tier);
      out += '\n';
    }
  }
  return out;
}

std::string series_json_rows(
    const std::vector<const imagtime::ObservableSeries*>& series) {
  nlohmann::json rows = nlohmann::json::array();
  for (const imagtime::ObservableSeries* s : series) {
    for (std::size_t r = 0; r < s->axis.size(); ++r) {
      rows.push_back({{"beta", s->axis[r]},
                      {"energy", s->energy[r]},
                      {"dx", s->dx[r]},
                      {"dp", s->dp[r]},
                      {"dxdp", s->dxdp[r]},
                      {"norm_prerenorm", s->norm_prerenorm[r]},
                      {"tier", s->tier}});
    }
  }
  return rows.dump(2);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw ConfigError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open for reading: " + path);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw std::runtime_error("digest context allocation failed");
  if (EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw std::runtime_error("digest init failed");
  }
  char buf[65536];
  while (in) {
    in.read(buf, sizeof(buf));
    const std::streamsize got = in.gcount();
    if (got > 0 &&
        EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(got)) != 1) {
      EVP_MD_CTX_free(ctx);
      throw std::runtime_error("digest update failed");
    }
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(ctx, md, &len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw std::runtime_error("digest final failed");
  }
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xf];
  }
  return out;
}

}  // namespace waveop::io
