#include "nighthaze/filters.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <string>

namespace nighthaze {

void FilterParams::validate() const {
  if (radius < 1) throw InvalidArgument("filter radius must be >= 1, got " + std::to_string(radius));
  if (!(epsilon > 0.0)) throw InvalidArgument("filter epsilon must be > 0");
}

namespace {

void require_radius(int radius, const char* what) {
  if (radius < 1) {
    throw InvalidArgument(std::string(what) + ": radius must be >= 1, got " + std::to_string(radius));
  }
}

// Count of in-bounds samples along one axis for a window centered at i.
inline int clipped_extent(int i, int radius, int n) {
  return std::min(i + radius, n - 1) - std::max(i - radius, 0) + 1;
}

// Box mean of the values produced by `at(i)` for flat index i. The integral
// buffer is caller-owned so repeated calls reuse one allocation.
template <typename At>
void box_mean_plane(At at, std::span<double> dst, int w, int h, int radius, std::vector<double>& integral) {
  // Integral image with a zero guard row/column, accumulated in double.
  const std::size_t stride = static_cast<std::size_t>(w) + 1;
  integral.assign(stride * (static_cast<std::size_t>(h) + 1), 0.0);
  for (int y = 0; y < h; ++y) {
    double row = 0.0;
    const std::size_t base = static_cast<std::size_t>(y) * w;
    double* above = integral.data() + static_cast<std::size_t>(y) * stride;
    double* cur = above + stride;
    for (int x = 0; x < w; ++x) {
      row += at(base + x);
      cur[x + 1] = above[x + 1] + row;
    }
  }
  for (int y = 0; y < h; ++y) {
    const int y0 = std::max(y - radius, 0);
    const int y1 = std::min(y + radius, h - 1) + 1;
    const double* top = integral.data() + static_cast<std::size_t>(y0) * stride;
    const double* bot = integral.data() + static_cast<std::size_t>(y1) * stride;
    const int ny = y1 - y0;
    double* out = dst.data() + static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      const int x0 = std::max(x - radius, 0);
      const int x1 = std::min(x + radius, w - 1) + 1;
      const double sum = bot[x1] - bot[x0] - top[x1] + top[x0];
      out[x] = sum / static_cast<double>(ny * (x1 - x0));
    }
  }
}

// Sliding-window extremum along one axis with a monotonic deque. Operates on
// `n` samples spaced `stride` apart; `better(a, b)` is true when a should
// displace b. Ties keep the earlier sample, so the result index is the first
// occurrence.
template <typename Better>
void sliding_extreme_1d(const double* values, const std::size_t* source_index, std::size_t stride,
                        int n, int radius, Better better, double* out_value,
                        std::size_t* out_index, std::vector<int>& queue) {
  queue.resize(static_cast<std::size_t>(n));
  int head = 0;
  int tail = 0;
  int next = 0;
  for (int i = 0; i < n; ++i) {
    const int hi = std::min(i + radius, n - 1);
    while (next <= hi) {
      const double v = values[static_cast<std::size_t>(next) * stride];
      while (tail > head && better(v, values[static_cast<std::size_t>(queue[tail - 1]) * stride])) {
        --tail;
      }
      queue[tail++] = next++;
    }
    const int lo = i - radius;
    while (queue[head] < lo) ++head;
    const std::size_t best = static_cast<std::size_t>(queue[head]) * stride;
    out_value[static_cast<std::size_t>(i) * stride] = values[best];
    if (out_index != nullptr) {
      out_index[static_cast<std::size_t>(i) * stride] = source_index[best];
    }
  }
}

// Cache-blocked transpose of a w x h row-major plane into h x w.
template <typename T>
void transpose_plane(const T* src, T* dst, int w, int h) {
  constexpr int kBlock = 32;
  for (int y0 = 0; y0 < h; y0 += kBlock) {
    const int y1 = std::min(y0 + kBlock, h);
    for (int x0 = 0; x0 < w; x0 += kBlock) {
      const int x1 = std::min(x0 + kBlock, w);
      for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
          dst[static_cast<std::size_t>(x) * h + y] = src[static_cast<std::size_t>(y) * w + x];
        }
      }
    }
  }
}

// Separable 2-D window extremum; rows first, then columns. The column pass
// runs over a transposed copy so both passes read contiguous memory. When
// `indices` is non-null it receives the flat source index of the selected
// sample.
template <typename Better>
void window_extreme_plane(std::span<const double> src, std::span<double> dst, int w, int h,
                          int radius, Better better, std::vector<std::size_t>* indices) {
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  std::vector<double> rows(n);
  std::vector<double> cols(n);
  std::vector<double> cols_out(n);
  std::vector<std::size_t> identity;
  std::vector<std::size_t> row_index;
  std::vector<std::size_t> col_index;
  std::vector<std::size_t> col_index_out;
  if (indices != nullptr) {
    identity.resize(n);
    for (std::size_t i = 0; i < n; ++i) identity[i] = i;
    row_index.resize(n);
    col_index.resize(n);
    col_index_out.resize(n);
    indices->resize(n);
  }
  std::vector<int> queue;
  for (int y = 0; y < h; ++y) {
    const std::size_t off = static_cast<std::size_t>(y) * w;
    sliding_extreme_1d(src.data() + off, indices ? identity.data() + off : nullptr, 1, w, radius,
                       better, rows.data() + off, indices ? row_index.data() + off : nullptr,
                       queue);
  }
  transpose_plane(rows.data(), cols.data(), w, h);
  if (indices != nullptr) transpose_plane(row_index.data(), col_index.data(), w, h);
  for (int x = 0; x < w; ++x) {
    const std::size_t off = static_cast<std::size_t>(x) * h;
    sliding_extreme_1d(cols.data() + off, indices ? col_index.data() + off : nullptr, 1, h, radius,
                       better, cols_out.data() + off, indices ? col_index_out.data() + off : nullptr,
                       queue);
  }
  transpose_plane(cols_out.data(), dst.data(), h, w);
  if (indices != nullptr) transpose_plane(col_index_out.data(), indices->data(), h, w);
}

template <typename Better>
PlanarImage window_extreme(const PlanarImage& img, int radius, Better better, const char* what) {
  require_non_empty(img, what);
  require_radius(radius, what);
  PlanarImage out(img.width(), img.height(), img.channels());
  for (int c = 0; c < img.channels(); ++c) {
    window_extreme_plane(img.plane(c), out.plane(c), img.width(), img.height(), radius, better,
                         nullptr);
  }
  return out;
}

}  // namespace

PlanarImage box_mean(const PlanarImage& img, int radius) {
  require_non_empty(img, "box_mean");
  require_radius(radius, "box_mean");
  PlanarImage out(img.width(), img.height(), img.channels());
  std::vector<double> integral;
  for (int c = 0; c < img.channels(); ++c) {
    const double* src = img.plane(c).data();
    box_mean_plane([src](std::size_t i) { return src[i]; }, out.plane(c), img.width(), img.height(), radius,
                   integral);
  }
  return out;
}

PlanarImage window_min(const PlanarImage& img, int radius) {
  return window_extreme(img, radius, std::less<double>{}, "window_min");
}

PlanarImage window_max(const PlanarImage& img, int radius) {
  return window_extreme(img, radius, std::greater<double>{}, "window_max");
}

std::vector<std::size_t> window_argmax(const PlanarImage& img, int radius) {
  require_channels(img, 1, "window_argmax");
  require_radius(radius, "window_argmax");
  PlanarImage scratch(img.width(), img.height(), 1);
  std::vector<std::size_t> indices;
  window_extreme_plane(img.plane(0), scratch.plane(0), img.width(), img.height(), radius,
                       std::greater<double>{}, &indices);
  return indices;
}

PlanarImage guided_filter(const PlanarImage& p, const PlanarImage& guide, const FilterParams& params) {
  require_channels(p, 1, "guided_filter");
  require_channels(guide, 1, "guided_filter");
  require_same_size(p, guide, "guided_filter");
  params.validate();
  const int r = params.radius;

  const int w = p.width();
  const int h = p.height();
  const double* pi = p.data().data();
  const double* gi = guide.data().data();

  std::vector<double> integral;
  PlanarImage mean_i(w, h, 1);
  PlanarImage mean_p(w, h, 1);
  PlanarImage a(w, h, 1);  // holds corr(I, I) until overwritten by a_k
  PlanarImage b(w, h, 1);  // holds corr(I, p) until overwritten by b_k
  box_mean_plane([gi](std::size_t i) { return gi[i]; }, mean_i.data(), w, h, r, integral);
  box_mean_plane([pi](std::size_t i) { return pi[i]; }, mean_p.data(), w, h, r, integral);
  box_mean_plane([gi](std::size_t i) { return gi[i] * gi[i]; }, a.data(), w, h, r, integral);
  box_mean_plane([gi, pi](std::size_t i) { return gi[i] * pi[i]; }, b.data(), w, h, r, integral);
  {
    auto mi = mean_i.data();
    auto mp = mean_p.data();
    auto da = a.data();
    auto db = b.data();
    for (std::size_t k = 0; k < da.size(); ++k) {
      const double var = da[k] - mi[k] * mi[k];
      const double cov = db[k] - mi[k] * mp[k];
      da[k] = cov / (var + params.epsilon);
      db[k] = mp[k] - da[k] * mi[k];
    }
  }

  const double* ai = a.data().data();
  const double* bi = b.data().data();
  box_mean_plane([ai](std::size_t i) { return ai[i]; }, mean_i.data(), w, h, r, integral);
  box_mean_plane([bi](std::size_t i) { return bi[i]; }, mean_p.data(), w, h, r, integral);
  auto ma = mean_i.data();
  auto dout = mean_p.data();
  for (std::size_t k = 0; k < dout.size(); ++k) dout[k] += ma[k] * gi[k];
  return mean_p;
}

PlanarImage value_channel(const PlanarImage& img) {
  require_channels(img, 3, "value_channel");
  PlanarImage out(img.width(), img.height(), 1);
  auto r = img.plane(0);
  auto g = img.plane(1);
  auto b = img.plane(2);
  auto dout = out.data();
  for (std::size_t i = 0; i < dout.size(); ++i) dout[i] = std::max({r[i], g[i], b[i]});
  return out;
}

PlanarImage channel_min(const PlanarImage& img) {
  require_non_empty(img, "channel_min");
  PlanarImage out = img.channel(0);
  auto dout = out.data();
  for (int c = 1; c < img.channels(); ++c) {
    auto src = img.plane(c);
    for (std::size_t i = 0; i < dout.size(); ++i) dout[i] = std::min(dout[i], src[i]);
  }
  return out;
}

PlanarImage channel_mean(const PlanarImage& img) {
  require_non_empty(img, "channel_mean");
  if (img.channels() == 1) return img;
  PlanarImage out(img.width(), img.height(), 1);
  auto dout = out.data();
  for (int c = 0; c < img.channels(); ++c) {
    auto src = img.plane(c);
    for (std::size_t i = 0; i < dout.size(); ++i) dout[i] += src[i];
  }
  const double inv = 1.0 / img.channels();
  for (double& v : dout) v *= inv;
  return out;
}

double percentile(std::vector<double> values, double rank) {
  if (values.empty()) throw InvalidArgument("percentile: empty input");
  if (!(rank >= 0.0 && rank <= 100.0)) throw InvalidArgument("percentile: rank must be in [0, 100]");
  const auto n = static_cast<long long>(values.size());
  long long k = static_cast<long long>(std::ceil(rank * static_cast<double>(n) / 100.0));
  k = std::clamp(k, 1LL, n);
  auto nth = values.begin() + (k - 1);
  std::nth_element(values.begin(), nth, values.end());
  return *nth;
}

double percentile(const PlanarImage& img, double rank) {
  require_non_empty(img, "percentile");
  return percentile(std::vector<double>(img.data().begin(), img.data().end()), rank);
}

}  // namespace nighthaze
