#include "wlss/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace wlss {

QuadratureRule composite_gauss(std::vector<double> breaks) {
  using GL = boost::math::quadrature::gauss<double, 20>;
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  const auto& ab = GL::abscissa();
  const auto& wt = GL::weights();
  QuadratureRule r;
  r.x.reserve(20 * breaks.size());
  r.w.reserve(20 * breaks.size());
  for (size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double a = breaks[p], b = breaks[p + 1];
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (size_t i = 0; i < ab.size(); ++i) {
      r.x.push_back(c + h * ab[i]);
      r.w.push_back(h * wt[i]);
      if (ab[i] != 0) {
        r.x.push_back(c - h * ab[i]);
        r.w.push_back(h * wt[i]);
      }
    }
  }
  return r;
}

QuadratureRule feature_rule(double a, double b, double base_width,
                            const std::vector<std::pair<double, double>>& features) {
  require(b > a && base_width > 0, "feature_rule: bad interval");
  std::vector<double> br;
  const int panels = std::max(1, int(std::ceil((b - a) / base_width)));
  for (int i = 0; i <= panels; ++i) br.push_back(a + (b - a) * i / panels);
  for (const auto& [c, w] : features) {
    if (w <= 0) continue;
    for (double d = 0.5 * w; d < 2 * base_width; d *= 2) {
      for (double x : {c - d, c + d})
        if (x > a && x < b) br.push_back(x);
    }
    if (c > a && c < b) br.push_back(c);
  }
  return composite_gauss(std::move(br));
}

Integral integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                            double tol, unsigned max_depth) {
  double err = 0;
  const double v =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, max_depth, tol, &err);
  return {v, err};
}

}  // namespace wlss
