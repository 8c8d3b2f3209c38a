#include "data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>

#include <zlib.h>

#include "errors.hpp"
#include "random.hpp"

namespace forks {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw InputError("line " + std::to_string(line) + ": " + what);
}

double parse_number(std::string_view tok, std::size_t line) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty()) {
    fail(line, "not a number: '" + std::string(tok) + "'");
  }
  if (!std::isfinite(v)) fail(line, "non-finite value '" + std::string(tok) + "'");
  return v;
}

std::uint64_t parse_index(std::string_view tok, std::size_t line) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty()) {
    fail(line, "bad feature index '" + std::string(tok) + "'");
  }
  if (v == 0) fail(line, "feature indices are 1-based");
  if (v > std::numeric_limits<std::uint32_t>::max()) fail(line, "feature index too large");
  return v;
}

void append_number(std::string& out, double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

}  // namespace

Dataset parse_libsvm(std::string_view text, std::string name) {
  Dataset ds;
  ds.name = std::move(name);
  std::vector<double> raw_labels;
  std::vector<std::size_t> line_of;

  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    Example ex;
    bool first = true;
    double label = 0.0;
    while (!line.empty()) {
      const auto sp = line.find_first_of(" \t");
      const std::string_view tok = line.substr(0, sp);
      line = sp == std::string_view::npos ? std::string_view{} : trim(line.substr(sp));
      if (first) {
        label = parse_number(tok, line_no);
        first = false;
        continue;
      }
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos) fail(line_no, "expected idx:value, got '" + std::string(tok) + "'");
      const auto idx = static_cast<std::uint32_t>(parse_index(tok.substr(0, colon), line_no) - 1);
      const double val = parse_number(tok.substr(colon + 1), line_no);
      if (!ex.x.index.empty() && idx <= ex.x.index.back()) fail(line_no, "feature indices must increase");
      ex.x.index.push_back(idx);
      ex.x.value.push_back(val);
    }
    if (label != std::round(label)) fail(line_no, "label must be an integer class");
    if (!ex.x.index.empty()) ds.dim = std::max<std::size_t>(ds.dim, ex.x.index.back() + 1u);
    raw_labels.push_back(label);
    line_of.push_back(line_no);
    ds.examples.push_back(std::move(ex));
  }

  const std::set<double> seen(raw_labels.begin(), raw_labels.end());
  const auto within = [&](std::initializer_list<double> allowed) {
    return std::all_of(seen.begin(), seen.end(), [&](double l) {
      return std::find(allowed.begin(), allowed.end(), l) != allowed.end();
    });
  };
  double negative = -1.0;
  if (within({-1.0, 1.0})) {
    negative = -1.0;
  } else if (within({0.0, 1.0})) {
    negative = 0.0;
  } else if (within({1.0, 2.0})) {
    negative = 2.0;
  } else {
    for (std::size_t i = 0; i < raw_labels.size(); ++i) {
      const double l = raw_labels[i];
      if (l != -1.0 && l != 0.0 && l != 1.0 && l != 2.0) fail(line_of[i], "unmappable label");
    }
    fail(line_of.back(), "labels mix incompatible binary schemes");
  }
  for (std::size_t i = 0; i < raw_labels.size(); ++i) {
    ds.examples[i].y = raw_labels[i] == negative ? -1 : 1;
  }
  return ds;
}

std::string serialize_libsvm(const Dataset& ds) {
  std::string out;
  for (const auto& ex : ds.examples) {
    out += ex.y > 0 ? "+1" : "-1";
    for (std::size_t n = 0; n < ex.x.nnz(); ++n) {
      out += ' ';
      out += std::to_string(ex.x.index[n] + 1u);
      out += ':';
      append_number(out, ex.x.value[n]);
    }
    out += '\n';
  }
  return out;
}

Dataset load_libsvm(const std::string& path) {
  // gzread passes uncompressed files through unchanged.
  gzFile f = gzopen(path.c_str(), "rb");
  if (f == nullptr) throw IoError("cannot open '" + path + "'");
  std::string text;
  char buf[1 << 16];
  int got = 0;
  while ((got = gzread(f, buf, sizeof buf)) > 0) text.append(buf, static_cast<std::size_t>(got));
  int err = Z_OK;
  const char* msg = gzerror(f, &err);
  const std::string detail = msg ? msg : "";
  gzclose(f);
  if (got < 0 || (err != Z_OK && err != Z_STREAM_END)) {
    throw IoError("cannot read '" + path + "': " + detail);
  }

  std::string name = path;
  if (const auto slash = name.find_last_of('/'); slash != std::string::npos) name = name.substr(slash + 1);
  try {
    return parse_libsvm(text, name);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

void save_libsvm(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot create '" + path + "'");
  const std::string text = serialize_libsvm(ds);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed for '" + path + "'");
}

Dataset permute(const Dataset& ds, std::uint64_t seed) {
  Dataset out = ds;
  Rng rng(seed);
  for (std::size_t i = out.examples.size(); i > 1; --i) {
    std::swap(out.examples[i - 1], out.examples[rng.below(i)]);
  }
  return out;
}

Dataset adversarial_stream(const Dataset& ds, std::size_t blocks, std::size_t repeats,
                           std::uint64_t seed) {
  if (blocks == 0 || repeats == 0) throw ConfigError("adversarial stream needs b, r >= 1");
  if (ds.examples.empty()) throw InputError("adversarial stream needs a nonempty dataset");
  Dataset out;
  out.dim = ds.dim;
  out.name = ds.name + "-adv";
  out.examples.reserve(blocks * repeats);
  Rng rng(seed);
  for (std::size_t b = 1; b <= blocks; ++b) {
    Example ex = ds.examples[rng.below(ds.examples.size())];
    if (b % 2 == 0) ex.y = -ex.y;
    for (std::size_t r = 0; r < repeats; ++r) out.examples.push_back(ex);
  }
  return out;
}

Dataset minmax_scale(const Dataset& ds, double lo, double hi) {
  if (!(hi > lo)) throw ConfigError("minmax_scale needs lo < hi");
  const std::size_t d = ds.dim;
  std::vector<double> mn(d, std::numeric_limits<double>::infinity());
  std::vector<double> mx(d, -std::numeric_limits<double>::infinity());
  std::vector<std::size_t> count(d, 0);
  for (const auto& ex : ds.examples) {
    for (std::size_t n = 0; n < ex.x.nnz(); ++n) {
      const auto j = ex.x.index[n];
      mn[j] = std::min(mn[j], ex.x.value[n]);
      mx[j] = std::max(mx[j], ex.x.value[n]);
      ++count[j];
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    if (count[j] < ds.examples.size()) {
      mn[j] = std::min(mn[j], 0.0);
      mx[j] = std::max(mx[j], 0.0);
    }
  }

  Dataset out;
  out.dim = d;
  out.name = ds.name;
  out.examples.reserve(ds.examples.size());
  std::vector<double> dense(d);
  for (const auto& ex : ds.examples) {
    std::fill(dense.begin(), dense.end(), 0.0);
    for (std::size_t n = 0; n < ex.x.nnz(); ++n) dense[ex.x.index[n]] = ex.x.value[n];
    Example scaled{{}, ex.y};
    for (std::size_t j = 0; j < d; ++j) {
      if (!(mx[j] > mn[j])) continue;
      const double v = lo + (dense[j] - mn[j]) * (hi - lo) / (mx[j] - mn[j]);
      if (v != 0.0) {
        scaled.x.index.push_back(static_cast<std::uint32_t>(j));
        scaled.x.value.push_back(v);
      }
    }
    out.examples.push_back(std::move(scaled));
  }
  return out;
}

SyntheticData synth_lowrank(std::size_t n, std::size_t d, std::size_t rank, double sigma,
                            std::uint64_t seed) {
  if (rank == 0 || rank > std::min(n, d)) throw ConfigError("synth_lowrank needs 1 <= rank <= min(n, d)");
  KernelConfig kernel{KernelFamily::gaussian, sigma};
  kernel.validate();

  Rng rng(seed);
  const auto dd = static_cast<Eigen::Index>(d);
  const auto rr = static_cast<Eigen::Index>(rank);
  Eigen::MatrixXd basis(dd, rr);
  for (Eigen::Index j = 0; j < rr; ++j) {
    for (Eigen::Index i = 0; i < dd; ++i) basis(i, j) = rng.normal();
  }
  basis /= std::sqrt(static_cast<double>(rank));
  Eigen::VectorXd normal(dd);
  for (Eigen::Index i = 0; i < dd; ++i) normal(i) = rng.normal();

  SyntheticData out;
  out.dataset.dim = d;
  out.dataset.name = "synth-lowrank";
  out.dataset.examples.reserve(n);
  Eigen::VectorXd coeff(rr);
  for (std::size_t t = 0; t < n; ++t) {
    for (Eigen::Index j = 0; j < rr; ++j) coeff(j) = rng.normal();
    const Eigen::VectorXd p = basis * coeff;
    Example ex;
    ex.x = SparseVector::from_dense({p.data(), static_cast<std::size_t>(p.size())});
    ex.y = normal.dot(p) >= 0.0 ? 1 : -1;
    out.dataset.examples.push_back(std::move(ex));
  }

  std::vector<SparseVector> points;
  points.reserve(n);
  for (const auto& ex : out.dataset.examples) points.push_back(ex.x);
  out.gram = gram(kernel, points);
  return out;
}

}  // namespace forks
