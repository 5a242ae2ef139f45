// Copyright 2026 The radscale Authors
// SPDX-License-Identifier: Apache-2.0
#include "radscale/field.hpp"

#include "radscale/image_io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>

namespace radscale {

template <typename T>
void FieldGradients<T>::resize(std::size_t voxels) {
  density.assign(voxels, T(0));
  color.assign(3 * voxels, T(0));
}

template <typename T>
void FieldGradients<T>::zero() {
  std::fill(density.begin(), density.end(), T(0));
  std::fill(color.begin(), color.end(), T(0));
}

template <typename T>
VoxelField<T>::VoxelField(const GridSize& resolution, const Box& bounds)
    : resolution_(resolution), bounds_(bounds) {
  for (int n : resolution_) {
    if (n < 2) throw InputError("field resolution must be at least 2 along every axis");
  }
  if (!bounds_.valid()) throw InputError("field bounds must satisfy max > min componentwise");
  for (int a = 0; a < 3; ++a) spacing_[a] = bounds_.size()[a] / (resolution_[a] - 1);
  origin_t_ = bounds_.min.cast<T>();
  inv_spacing_t_ = spacing_.cwiseInverse().cast<T>();
  const std::size_t n = static_cast<std::size_t>(resolution_[0]) * resolution_[1] * resolution_[2];
  density_.assign(n, static_cast<T>(softplus_inverse(kInitialDensity)));
  color_.assign(3 * n, T(0));
  grad_.resize(n);
}

template <typename T>
Vec3 VoxelField<T>::node_position(int i, int j, int k) const {
  return bounds_.min + Vec3(i * spacing_.x(), j * spacing_.y(), k * spacing_.z());
}

template <typename T>
bool VoxelField<T>::stencil(const Vec3T<T>& p, TrilinearStencil<T>& out) const {
  std::array<int, 3> cell;
  std::array<T, 3> frac;
  for (int a = 0; a < 3; ++a) {
    const T f = (p[a] - origin_t_[a]) * inv_spacing_t_[a];
    const T upper = static_cast<T>(resolution_[a] - 1);
    if (!(f >= T(0) && f <= upper)) return false;
    const int c = std::min(static_cast<int>(f), resolution_[a] - 2);
    cell[a] = c;
    frac[a] = f - static_cast<T>(c);
  }
  const std::size_t base = index(cell[0], cell[1], cell[2]);
  const std::size_t sx = 1;
  const std::size_t sy = static_cast<std::size_t>(resolution_[0]);
  const std::size_t sz = sy * static_cast<std::size_t>(resolution_[1]);
  const T wx[2] = {T(1) - frac[0], frac[0]};
  const T wy[2] = {T(1) - frac[1], frac[1]};
  const T wz[2] = {T(1) - frac[2], frac[2]};
  for (int c = 0; c < 8; ++c) {
    const int dx = c & 1, dy = (c >> 1) & 1, dz = (c >> 2) & 1;
    out.index[c] = base + dx * sx + dy * sy + dz * sz;
    out.weight[c] = wx[dx] * wy[dy] * wz[dz];
  }
  return true;
}

template <typename T>
FieldSample<T> VoxelField<T>::query(const Vec3T<T>& p) const {
  TrilinearStencil<T> st;
  FieldSample<T> s;
  if (!stencil(p, st)) return s;
  T d = 0, r = 0, g = 0, b = 0;
  for (int c = 0; c < 8; ++c) {
    const T w = st.weight[c];
    const std::size_t v = st.index[c];
    d += w * density_[v];
    r += w * color_[3 * v + 0];
    g += w * color_[3 * v + 1];
    b += w * color_[3 * v + 2];
  }
  s.sigma = softplus(d);
  s.rgb = Vec3T<T>(sigmoid(r), sigmoid(g), sigmoid(b));
  return s;
}

template <typename T>
void VoxelField<T>::query_backward(const Vec3T<T>& p, T d_sigma, const Vec3T<T>& d_rgb) {
  query_backward(p, d_sigma, d_rgb, grad_);
}

template <typename T>
void VoxelField<T>::query_backward(const Vec3T<T>& p, T d_sigma, const Vec3T<T>& d_rgb,
                                   FieldGradients<T>& into) const {
  accumulate(p, query(p), d_sigma, d_rgb, into);
}

template <typename T>
void VoxelField<T>::accumulate(const Vec3T<T>& p, const FieldSample<T>& sample, T d_sigma,
                               const Vec3T<T>& d_rgb, FieldGradients<T>& into) const {
  TrilinearStencil<T> st;
  if (!stencil(p, st)) return;
  const T g_d = d_sigma * -std::expm1(-sample.sigma);
  const Vec3T<T> g_c = d_rgb.cwiseProduct(sample.rgb.cwiseProduct(Vec3T<T>::Ones() - sample.rgb));
  T* dens = into.density.data();
  T* col = into.color.data();
  for (int c = 0; c < 8; ++c) {
    const T w = st.weight[c];
    const std::size_t v = st.index[c];
    dens[v] += w * g_d;
    col[3 * v + 0] += w * g_c[0];
    col[3 * v + 1] += w * g_c[1];
    col[3 * v + 2] += w * g_c[2];
  }
}

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  std::uint64_t uint(int width) {
    if (pos_ + width > bytes_.size()) throw IoError("checkpoint truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += width;
    return v;
  }
  std::string take(std::size_t n) {
    if (pos_ + n > bytes_.size()) throw IoError("checkpoint truncated");
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

template <typename T>
void save_checkpoint(const VoxelField<T>& field, const std::filesystem::path& path) {
  std::string out = "RSVF";
  put_u32(out, kCheckpointVersion);
  for (int n : field.resolution()) put_u32(out, static_cast<std::uint32_t>(n));
  for (int a = 0; a < 3; ++a) put_u64(out, std::bit_cast<std::uint64_t>(field.bounds().min[a]));
  for (int a = 0; a < 3; ++a) put_u64(out, std::bit_cast<std::uint64_t>(field.bounds().max[a]));
  out.reserve(out.size() + 16 * field.voxel_count());
  for (T v : field.density_raw()) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  for (T v : field.color_raw()) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  write_file_atomic(path, out);
}

template <typename T>
VoxelField<T> load_checkpoint(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  Reader in(bytes);
  if (in.take(4) != "RSVF") throw IoError("not an RSVF checkpoint: " + path.string());
  const auto version = in.uint(4);
  if (version != kCheckpointVersion) {
    throw IoError("unsupported RSVF version " + std::to_string(version));
  }
  GridSize res;
  for (int& n : res) n = static_cast<int>(in.uint(4));
  Box bounds;
  for (int a = 0; a < 3; ++a) bounds.min[a] = std::bit_cast<double>(in.uint(8));
  for (int a = 0; a < 3; ++a) bounds.max[a] = std::bit_cast<double>(in.uint(8));
  VoxelField<T> field(res, bounds);
  for (T& v : field.density_raw()) v = static_cast<T>(std::bit_cast<float>(static_cast<std::uint32_t>(in.uint(4))));
  for (T& v : field.color_raw()) v = static_cast<T>(std::bit_cast<float>(static_cast<std::uint32_t>(in.uint(4))));
  if (!in.done()) throw IoError("trailing bytes in checkpoint: " + path.string());
  return field;
}

template struct FieldGradients<float>;
template struct FieldGradients<double>;
template class VoxelField<float>;
template class VoxelField<double>;
template void save_checkpoint(const VoxelField<float>&, const std::filesystem::path&);
template void save_checkpoint(const VoxelField<double>&, const std::filesystem::path&);
template VoxelField<float> load_checkpoint<float>(const std::filesystem::path&);
template VoxelField<double> load_checkpoint<double>(const std::filesystem::path&);

}  // namespace radscale
