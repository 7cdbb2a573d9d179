#pragma once

namespace copeq {

template <class Fn>
void for_each_lattice_product(const std::vector<std::vector<std::vector<double>>>& tables,
                              std::size_t width, Fn&& fn) {
  const std::size_t dim = tables.size();
  if (dim == 0) return;
  const std::size_t per_axis = tables.front().size();
  std::vector<std::size_t> idx(dim, 0);
  // partial[l] = prod over axes 0..l at the current odometer position
  std::vector<std::vector<double>> partial(dim, std::vector<double>(width));
  auto refresh = [&](std::size_t from) {
    for (std::size_t l = from; l < dim; ++l) {
      const auto& row = tables[l][idx[l]];
      if (l == 0) {
        std::copy(row.begin(), row.end(), partial[0].begin());
      } else {
        const auto& prev = partial[l - 1];
        auto& cur = partial[l];
        for (std::size_t i = 0; i < width; ++i) cur[i] = prev[i] * row[i];
      }
    }
  };
  refresh(0);
  for (std::size_t p = 0;; ++p) {
    fn(p, static_cast<const std::vector<double>&>(partial[dim - 1]));
    std::size_t l = dim;
    while (l > 0) {
      --l;
      if (++idx[l] < per_axis) break;
      idx[l] = 0;
      if (l == 0) return;
    }
    refresh(l);
  }
}

}  // namespace copeq
