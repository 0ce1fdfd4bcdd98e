// Copyright 2026 The Contrail Explorer Authors
// SPDX-License-Identifier: Apache-2.0

#include "contrail/volume.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <thread>
#include <unordered_map>

#include "contrail/error.hpp"
#include "contrail/io.hpp"
#include "contrail/simd/kernels.hpp"
#include "json.hpp"

namespace contrail::volume {

using nlohmann::ordered_json;

std::string to_string(Attribute a) {
  switch (a) {
    case Attribute::temperature: return "temperature";
    case Attribute::diameter: return "diameter";
    case Attribute::ice_label: return "ice_label";
    case Attribute::group: return "group";
  }
  return "temperature";
}

std::string to_string(Aggregation a) {
  return a == Aggregation::gaussian_splat_mean ? "gaussian_splat_mean" : "gaussian_splat_sum";
}

Attribute attribute_from_string(std::string_view s) {
  if (s == "temperature") return Attribute::temperature;
  if (s == "diameter") return Attribute::diameter;
  if (s == "ice_label") return Attribute::ice_label;
  if (s == "group") return Attribute::group;
  throw Error(ErrorKind::InvalidArgument, "unknown grid attribute " + std::string(s));
}

Aggregation aggregation_from_string(std::string_view s) {
  if (s == "gaussian_splat_mean") return Aggregation::gaussian_splat_mean;
  if (s == "gaussian_splat_sum") return Aggregation::gaussian_splat_sum;
  throw Error(ErrorKind::InvalidArgument, "unknown aggregation " + std::string(s));
}

std::array<double, 3> DensityGrid::voxel_center(std::size_t i, std::size_t j, std::size_t k) const {
  const std::array<std::size_t, 3> ijk{i, j, k};
  std::array<double, 3> c{};
  for (int a = 0; a < 3; ++a)
    c[static_cast<std::size_t>(a)] =
        bounds.lo[static_cast<std::size_t>(a)] + (static_cast<double>(ijk[static_cast<std::size_t>(a)]) + 0.5) * spacing(a);
  return c;
}

namespace {

const double kTruncatedMass = std::erf(kTruncation / std::sqrt(2.0));

double phi(double u) { return 0.5 * std::erf(u / std::sqrt(2.0)); }

// Per-axis weights of one particle over the voxels its support touches.
struct AxisWindow {
  std::size_t first = 0;
  std::vector<double> w;
};

void axis_window(double p, double sigma, double lo, double h, std::size_t n, AxisWindow& out) {
  out.w.clear();
  const double a = p - kTruncation * sigma, b = p + kTruncation * sigma;
  const double fa = std::floor((a - lo) / h), fb = std::floor((b - lo) / h);
  if (fb < 0 || fa >= static_cast<double>(n)) return;
  const std::size_t i0 = fa < 0 ? 0 : static_cast<std::size_t>(fa);
  const std::size_t i1 = std::min(n - 1, static_cast<std::size_t>(fb));
  out.first = i0;
  for (std::size_t i = i0; i <= i1; ++i) {
    const double e0 = lo + static_cast<double>(i) * h;
    const double e1 = lo + static_cast<double>(i + 1) * h;
    out.w.push_back(axis_weight(p, sigma, e0, e1));
  }
}

struct Splat {
  const double* x;
  const double* y;
  const double* z;
  std::vector<std::size_t> rows;  // particles to splat
  std::vector<double> value;      // per entry of rows; weight multiplier
};

// Accumulates sum_p value_p * K_p into grid. Threads own disjoint z slabs and
// visit particles in the same order, so the result does not depend on the
// thread count.
void splat(const Splat& s, const DensityGrid& geom, double sigma, std::vector<double>& grid, unsigned threads) {
  const auto nx = geom.dims[0], ny = geom.dims[1], nz = geom.dims[2];
  const double hx = geom.spacing(0), hy = geom.spacing(1), hz = geom.spacing(2);
  const auto& axpy = simd::kernels().axpy;

  auto work = [&](std::size_t z0, std::size_t z1) {
    AxisWindow wx, wy, wz;
    for (std::size_t r = 0; r < s.rows.size(); ++r) {
      const std::size_t p = s.rows[r];
      axis_window(s.z[p], sigma, geom.bounds.lo[2], hz, nz, wz);
      if (wz.w.empty() || wz.first >= z1 || wz.first + wz.w.size() <= z0) continue;
      axis_window(s.x[p], sigma, geom.bounds.lo[0], hx, nx, wx);
      if (wx.w.empty()) continue;
      axis_window(s.y[p], sigma, geom.bounds.lo[1], hy, ny, wy);
      if (wy.w.empty()) continue;
      const double v = s.value[r];
      const std::size_t kb = std::max(z0, wz.first), ke = std::min(z1, wz.first + wz.w.size());
      for (std::size_t k = kb; k < ke; ++k) {
        const double az = v * wz.w[k - wz.first];
        for (std::size_t jj = 0; jj < wy.w.size(); ++jj) {
          const std::size_t j = wy.first + jj;
          axpy(az * wy.w[jj], wx.w.data(), grid.data() + geom.index(wx.first, j, k), wx.w.size());
        }
      }
    }
  };

  const unsigned t = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(nz)));
  if (t == 1) {
    work(0, nz);
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < t; ++i) {
    const std::size_t z0 = nz * i / t, z1 = nz * (i + 1) / t;
    pool.emplace_back(work, z0, z1);
  }
  for (auto& th : pool) th.join();
}

}  // namespace

double axis_weight(double p, double sigma, double e0, double e1) {
  const double a = std::max(e0, p - kTruncation * sigma);
  const double b = std::min(e1, p + kTruncation * sigma);
  if (!(b > a)) return 0.0;
  return (phi((b - p) / sigma) - phi((a - p) / sigma)) / kTruncatedMass;
}

Bounds padded_bounds(const ParticleSnapshot& s, double sigma) {
  Bounds b;
  if (s.size() == 0) {
    b.hi = {1.0, 1.0, 1.0};
    return b;
  }
  const double pad = kTruncation * sigma;
  const std::array<const std::vector<double>*, 3> axes{&s.x, &s.y, &s.z};
  for (std::size_t a = 0; a < 3; ++a) {
    const auto [mn, mx] = std::minmax_element(axes[a]->begin(), axes[a]->end());
    b.lo[a] = *mn - pad;
    b.hi[a] = *mx + pad;
    if (!(b.hi[a] > b.lo[a])) b.hi[a] = b.lo[a] + 1.0;
  }
  return b;
}

DensityGrid rasterize(const ParticleSnapshot& snapshot, Attribute attribute, const RasterOptions& options) {
  if (!(options.kernel_sigma > 0) || !std::isfinite(options.kernel_sigma))
    throw Error(ErrorKind::InvalidArgument, "kernel_sigma must be positive");
  for (auto d : options.dims)
    if (d < 2) throw Error(ErrorKind::InvalidArgument, "grid dims must be at least 2 per axis");
  if (snapshot.size() > 0 && snapshot.dim != 3)
    throw Error(ErrorKind::DimensionError, "rasterize needs 3D positions");

  DensityGrid g;
  g.attribute = attribute;
  g.dims = options.dims;
  g.kernel_sigma = options.kernel_sigma;
  g.bounds = options.bounds ? *options.bounds : padded_bounds(snapshot, options.kernel_sigma);
  for (std::size_t a = 0; a < 3; ++a)
    if (!(g.bounds.hi[a] > g.bounds.lo[a])) throw Error(ErrorKind::InvalidArgument, "degenerate grid bounds");
  if (attribute == Attribute::group) {
    g.aggregation = Aggregation::gaussian_splat_sum;
  } else if (options.aggregation) {
    g.aggregation = *options.aggregation;
  } else {
    g.aggregation = attribute == Attribute::ice_label ? Aggregation::gaussian_splat_sum : Aggregation::gaussian_splat_mean;
  }
  g.values.assign(g.voxel_count(), 0.0);
  const unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  if (snapshot.size() == 0) {
    if (attribute == Attribute::group) {
      std::fill(g.values.begin(), g.values.end(), -1.0);
      g.density.assign(g.voxel_count(), 0.0);
    }
    return g;
  }

  Splat s{snapshot.x.data(), snapshot.y.data(), snapshot.z.data(), {}, {}};
  const double sigma = options.kernel_sigma;

  if (attribute == Attribute::group) {
    if (!options.groups) throw Error(ErrorKind::InvalidArgument, "group grid needs a group assignment");
    const auto& ga = *options.groups;
    std::unordered_map<std::int64_t, std::size_t> row_of;
    row_of.reserve(snapshot.size());
    for (std::size_t i = 0; i < snapshot.size(); ++i) row_of.emplace(snapshot.particle_id[i], i);
    std::vector<std::vector<std::size_t>> members(ga.groups.size());
    for (std::size_t i = 0; i < ga.ice_ids.size(); ++i) {
      const auto it = row_of.find(ga.ice_ids[i]);
      if (it == row_of.end()) throw Error(ErrorKind::NotFound, "grouped particle " + std::to_string(ga.ice_ids[i]));
      s.rows.push_back(it->second);
      if (ga.labels[i] >= 0) members[static_cast<std::size_t>(ga.labels[i])].push_back(it->second);
    }
    std::sort(s.rows.begin(), s.rows.end());
    s.value.assign(s.rows.size(), 1.0);
    g.density.assign(g.voxel_count(), 0.0);
    splat(s, g, sigma, g.density, threads);

    std::fill(g.values.begin(), g.values.end(), -1.0);
    std::vector<double> best(g.voxel_count(), 0.0), tmp(g.voxel_count());
    for (std::size_t grp = 0; grp < members.size(); ++grp) {
      std::fill(tmp.begin(), tmp.end(), 0.0);
      Splat one{s.x, s.y, s.z, members[grp], std::vector<double>(members[grp].size(), 1.0)};
      std::sort(one.rows.begin(), one.rows.end());
      splat(one, g, sigma, tmp, threads);
      for (std::size_t v = 0; v < tmp.size(); ++v)
        if (tmp[v] > best[v]) {
          best[v] = tmp[v];
          g.values[v] = static_cast<double>(grp);
        }
    }
    return g;
  }

  const std::vector<double>* attr = nullptr;
  std::vector<double> ice;
  switch (attribute) {
    case Attribute::temperature: attr = &snapshot.temperature; break;
    case Attribute::diameter: attr = &snapshot.diameter; break;
    default:
      ice.assign(snapshot.ice_flag.begin(), snapshot.ice_flag.end());
      attr = &ice;
  }

  for (std::size_t i = 0; i < snapshot.size(); ++i) s.rows.push_back(i);
  if (g.aggregation == Aggregation::gaussian_splat_sum) {
    s.value = *attr;
    splat(s, g, sigma, g.values, threads);
    return g;
  }
  s.value = *attr;
  splat(s, g, sigma, g.values, threads);
  std::vector<double> weight(g.voxel_count(), 0.0);
  s.value.assign(snapshot.size(), 1.0);
  splat(s, g, sigma, weight, threads);
  for (std::size_t v = 0; v < weight.size(); ++v) g.values[v] = weight[v] > 0 ? g.values[v] / weight[v] : 0.0;
  return g;
}

namespace {

static_assert(std::endian::native == std::endian::little, "grid encoding assumes a little-endian host");

ordered_json header_of(const DensityGrid& g) {
  float lo = std::numeric_limits<float>::infinity(), hi = -lo;
  for (double v : g.values) {
    const float f = static_cast<float>(v);
    lo = std::min(lo, f);
    hi = std::max(hi, f);
  }
  if (g.values.empty()) lo = hi = 0.0f;
  ordered_json h;
  h["attribute"] = to_string(g.attribute);
  h["dims"] = {g.dims[0], g.dims[1], g.dims[2]};
  h["bounds"] = {{"min", {g.bounds.lo[0], g.bounds.lo[1], g.bounds.lo[2]}},
                 {"max", {g.bounds.hi[0], g.bounds.hi[1], g.bounds.hi[2]}}};
  h["aggregation"] = to_string(g.aggregation);
  h["kernel_sigma"] = g.kernel_sigma;
  h["value_range"] = {lo, hi};
  h["channels"] = g.density.empty() ? ordered_json::array({"value"}) : ordered_json::array({"group", "density"});
  h["encoding"] = "float32-le";
  h["order"] = "x-fastest";
  return h;
}

void append_floats(std::string& out, const std::vector<double>& v) {
  const std::size_t at = out.size();
  out.resize(at + v.size() * 4);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const float f = static_cast<float>(v[i]);
    std::memcpy(out.data() + at + 4 * i, &f, 4);
  }
}

}  // namespace

std::string grid_header_json(const DensityGrid& grid) { return header_of(grid).dump(); }

std::string encode_grid(const DensityGrid& grid) {
  const std::string header = grid_header_json(grid);
  const auto len = static_cast<std::uint32_t>(header.size());
  std::string out(4, '\0');
  std::memcpy(out.data(), &len, 4);
  out += header;
  out.reserve(out.size() + 4 * (grid.values.size() + grid.density.size()));
  append_floats(out, grid.values);
  append_floats(out, grid.density);
  return out;
}

DensityGrid decode_grid(std::string_view bytes) {
  if (bytes.size() < 4) throw Error(ErrorKind::SchemaError, "grid: truncated length prefix");
  std::uint32_t len = 0;
  std::memcpy(&len, bytes.data(), 4);
  if (bytes.size() < 4ull + len) throw Error(ErrorKind::SchemaError, "grid: truncated header");
  DensityGrid g;
  try {
    const auto h = ordered_json::parse(bytes.substr(4, len));
    g.attribute = attribute_from_string(h.at("attribute").get<std::string>());
    g.aggregation = aggregation_from_string(h.at("aggregation").get<std::string>());
    for (std::size_t a = 0; a < 3; ++a) {
      g.dims[a] = h.at("dims").at(a).get<std::size_t>();
      g.bounds.lo[a] = h.at("bounds").at("min").at(a).get<double>();
      g.bounds.hi[a] = h.at("bounds").at("max").at(a).get<double>();
    }
    g.kernel_sigma = h.at("kernel_sigma").get<double>();
    const std::size_t channels = h.at("channels").size();
    const std::size_t n = g.voxel_count();
    const std::string_view block = bytes.substr(4 + len);
    if (block.size() != 4 * n * channels) throw Error(ErrorKind::SchemaError, "grid: block size mismatch");
    auto read = [&](std::size_t offset, std::vector<double>& out) {
      out.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        float f;
        std::memcpy(&f, block.data() + offset + 4 * i, 4);
        out[i] = f;
      }
    };
    read(0, g.values);
    if (channels == 2) read(4 * n, g.density);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SchemaError, std::string("grid header: ") + e.what());
  }
  return g;
}

void export_grid(const DensityGrid& grid, const std::filesystem::path& path) {
  write_text_file(path, encode_grid(grid));
}

DensityGrid import_grid(const std::filesystem::path& path) { return decode_grid(read_text_file(path)); }

}  // namespace contrail::volume
