#include "isofp/test_function.hpp"

#include <algorithm>
#include <cstdio>
#include <random>

namespace isofp {

std::string support_name(const Support& s) {
  char buf[64];
  switch (s.kind) {
    case SupportKind::full: return "full";
    case SupportKind::outside_ball: std::snprintf(buf, sizeof buf, "outside_ball(%g)", s.radius); return buf;
    case SupportKind::inside_ball: std::snprintf(buf, sizeof buf, "inside_ball(%g)", s.radius); return buf;
  }
  return "?";
}

TestFunction::TestFunction(std::string id, int dim, Fn fn, std::vector<std::string> tags, Support support,
                           bool bounded, double growth, std::vector<double> radial_breaks)
    : id_(std::move(id)),
      dim_(dim),
      fn_(std::move(fn)),
      tags_(std::move(tags)),
      support_(support),
      bounded_(bounded),
      growth_(growth),
      breaks_(std::move(radial_breaks)) {
  if (dim < 1 || dim > kMaxDim) throw DomainError("TestFunction: dimension out of range");
}

bool TestFunction::has_tag(const std::string& t) const {
  return std::find(tags_.begin(), tags_.end(), t) != tags_.end();
}

TestFunction TestFunction::affine(double s, double c) const {
  Fn f = fn_;
  TestFunction out = *this;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g*(%s)+%g", s, id_.c_str(), c);
  out.id_ = buf;
  out.fn_ = [f, s, c](const Point& x, Point& g) {
    const double v = f(x, g);
    g *= s;
    return s * v + c;
  };
  // A shifted compactly supported function no longer vanishes off its support.
  if (c != 0.0) out.support_ = {};
  return out;
}

namespace {

Point random_point(std::mt19937_64& rng, int n, double lo_r, double hi_r) {
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  Point x(n);
  for (int k = 0; k < n; ++k) x(k) = nd(rng);
  const double r = lo_r + (hi_r - lo_r) * ud(rng);
  return x * (r / x.norm());
}

}  // namespace

SelfTestResult gradient_self_test(const TestFunction& phi, std::uint64_t seed, int probes, double tol) {
  std::mt19937_64 rng(seed);
  const int n = phi.dim();
  double hi_r = 3.0;
  for (double b : phi.radial_breaks()) hi_r = std::max(hi_r, b + 1.0);
  if (phi.support().kind != SupportKind::full) hi_r = std::max(hi_r, phi.support().radius + 1.0);
  SelfTestResult res;
  Point g(n), gp(n), gm(n);
  for (int p = 0; p < probes; ++p) {
    const Point x = random_point(rng, n, 0.05, hi_r);
    phi.eval(x, g);
    const double scale = std::max(g.cwiseAbs().maxCoeff(), 1.0);
    for (int k = 0; k < n; ++k) {
      const double h = 1e-5 * std::max(1.0, std::abs(x(k)));
      Point xp = x, xm = x;
      xp(k) += h;
      xm(k) -= h;
      const double fd = (phi.eval(xp, gp) - phi.eval(xm, gm)) / (2 * h);
      const double err = std::abs(fd - g(k)) / scale;
      res.max_error = std::max(res.max_error, err);
      if (!(err <= tol)) {
        res.ok = false;
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s: d/dx%d mismatch %.3g at |x|=%.3g", phi.id().c_str(), k, err,
                      x.norm());
        res.message = buf;
      }
    }
  }
  return res;
}

SelfTestResult support_self_test(const TestFunction& phi, std::uint64_t seed, int probes) {
  SelfTestResult res;
  const Support s = phi.support();
  if (s.kind == SupportKind::full) return res;
  std::mt19937_64 rng(seed);
  const int n = phi.dim();
  Point g(n);
  for (int p = 0; p < probes; ++p) {
    Point x = s.kind == SupportKind::outside_ball ? random_point(rng, n, 0.0, s.radius)
                                                   : random_point(rng, n, s.radius, s.radius + 5.0);
    // Include the sphere itself.
    if (p == 0) x *= s.radius / std::max(x.norm(), 1e-300);
    const double v = phi.eval(x, g);
    const double m = std::max(std::abs(v), g.cwiseAbs().maxCoeff());
    res.max_error = std::max(res.max_error, m);
    // Rounding on the sphere itself leaves values of order eps^3.
    if (m > 1e-12) {
      res.ok = false;
      res.message = phi.id() + ": nonzero where the support flag says it vanishes";
    }
  }
  return res;
}

double smoothstep5(double t) {
  if (t <= 0) return 0.0;
  if (t >= 1) return 1.0;
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double smoothstep5_deriv(double t) {
  if (t <= 0 || t >= 1) return 0.0;
  return 30.0 * t * t * (1 - t) * (1 - t);
}

TestFunction linear_function(int n, int k) {
  return TestFunction(
      "lin_x" + std::to_string(k), n,
      [k](const Point& x, Point& g) {
        g.setZero(x.size());
        g(k) = 1.0;
        return x(k);
      },
      {"linear"}, {}, false, 1.0);
}

TestFunction radial_function(int n, std::string id, std::function<double(double)> a,
                             std::function<double(double)> da, std::vector<std::string> tags, bool bounded,
                             double growth, Support support, std::vector<double> breaks) {
  return TestFunction(
      std::move(id), n,
      [a, da](const Point& x, Point& g) {
        const double r = x.norm();
        if (r > 0) g = x * (da(r) / r);
        else g.setZero(x.size());
        return a(r);
      },
      std::move(tags), support, bounded, growth, std::move(breaks));
}

namespace {

// Quintic band: 0 below r0, rises to 1 on [r0, r1], 1 on [r1, r2], falls to
// 0 on [r2, r3]. r0 < 0 means no rising edge (1 near the origin).
struct Band {
  double r0, r1, r2, r3;
  double value(double r) const {
    double v = 1.0;
    if (r0 >= 0) v *= smoothstep5((r - r0) / (r1 - r0));
    v *= smoothstep5((r3 - r) / (r3 - r2));
    return v;
  }
  double deriv(double r) const {
    double up = 1.0, dup = 0.0;
    if (r0 >= 0) {
      up = smoothstep5((r - r0) / (r1 - r0));
      dup = smoothstep5_deriv((r - r0) / (r1 - r0)) / (r1 - r0);
    }
    const double dn = smoothstep5((r3 - r) / (r3 - r2));
    const double ddn = -smoothstep5_deriv((r3 - r) / (r3 - r2)) / (r3 - r2);
    return dup * dn + up * ddn;
  }
  std::vector<double> breaks() const {
    std::vector<double> b;
    for (double r : {r0, r1, r2, r3})
      if (r > 0) b.push_back(r);
    return b;
  }
};

// P(x) exp(-|x - c|^2 / (2 s^2)).
TestFunction poly_bump(int n, std::string id, std::function<double(const Point&, Point&)> poly, Point c,
                       double s) {
  return TestFunction(
      std::move(id), n,
      [poly, c, s](const Point& x, Point& g) {
        Point gp(x.size());
        const double p = poly(x, gp);
        const Point d = x - c;
        const double b = std::exp(-0.5 * d.squaredNorm() / (s * s));
        g = b * (gp - d * (p / (s * s)));
        return p * b;
      },
      {"bump", "mixed"}, {}, true, 0.0);
}

struct PolyDef {
  std::string name;
  std::function<double(const Point&, Point&)> f;
};

std::vector<PolyDef> bump_polys(int n) {
  const int l = n - 1;
  std::vector<PolyDef> v;
  v.push_back({"1", [](const Point& x, Point& g) {
                 g.setZero(x.size());
                 return 1.0;
               }});
  v.push_back({"x0", [](const Point& x, Point& g) {
                 g.setZero(x.size());
                 g(0) = 1;
                 return x(0);
               }});
  v.push_back({"x0xl", [l](const Point& x, Point& g) {
                 g.setZero(x.size());
                 g(0) += x(l);
                 g(l) += x(0);
                 return x(0) * x(l);
               }});
  v.push_back({"x0^2-xl", [l](const Point& x, Point& g) {
                 g.setZero(x.size());
                 g(0) += 2 * x(0);
                 g(l) -= 1;
                 return x(0) * x(0) - x(l);
               }});
  v.push_back({"x0^3", [](const Point& x, Point& g) {
                 g.setZero(x.size());
                 g(0) = 3 * x(0) * x(0);
                 return x(0) * x(0) * x(0);
               }});
  return v;
}

void push_radial_members(std::vector<TestFunction>& m, int n) {
  m.push_back(radial_function(
      n, "rad_gauss", [](double r) { return std::exp(-0.5 * r * r); },
      [](double r) { return -r * std::exp(-0.5 * r * r); }, {"radial", "bump"}, true, 0.0));
  m.push_back(radial_function(
      n, "rad_inv", [](double r) { return 1.0 / (1.0 + r * r); },
      [](double r) { return -2 * r / ((1.0 + r * r) * (1.0 + r * r)); }, {"radial"}, true, 0.0));
  m.push_back(radial_function(
      n, "rad_sat", [](double r) { return r * r / (1.0 + r * r); },
      [](double r) { return 2 * r / ((1.0 + r * r) * (1.0 + r * r)); }, {"radial"}, true, 0.0));
  m.push_back(radial_function(
      n, "rad_tanh", [](double r) { return std::tanh(r * r - 1.0); },
      [](double r) {
        const double t = std::tanh(r * r - 1.0);
        return 2 * r * (1 - t * t);
      },
      {"radial"}, true, 0.0));
  m.push_back(radial_function(
      n, "rad_lin_bump", [](double r) { return r * std::exp(-0.25 * r * r); },
      [](double r) { return (1 - 0.5 * r * r) * std::exp(-0.25 * r * r); }, {"radial", "bump", "linear"}, true,
      0.0));
  m.push_back(radial_function(
      n, "rad_sqrt", [](double r) { return std::sqrt(1.0 + r * r); },
      [](double r) { return r / std::sqrt(1.0 + r * r); }, {"radial"}, false, 1.0));
  m.push_back(radial_function(
      n, "rad_log", [](double r) { return std::log1p(r * r); },
      [](double r) { return 2 * r / (1.0 + r * r); }, {"radial"}, false, 0.5));
}

void push_compact_members(std::vector<TestFunction>& m, int n) {
  const Band cap{-1.0, 0.0, 0.5, 2.0};
  const Band band1{0.5, 1.0, 1.5, 2.5};
  const Band band2{1.0, 2.0, 2.0, 3.5};
  for (auto [id, b] : {std::pair<const char*, Band>{"cap", cap}, {"band1", band1}, {"band2", band2}}) {
    Support s = b.r0 >= 0 ? Support{SupportKind::outside_ball, b.r0} : Support{SupportKind::inside_ball, b.r3};
    m.push_back(radial_function(
        n, std::string("c2_") + id, [b](double r) { return b.value(r); },
        [b](double r) { return b.deriv(r); }, {"bump", "radial", "compact"}, true, 0.0, s, b.breaks()));
  }
  Point c = Point::Zero(n);
  c(0) = 0.5;
  const double s = 1.5;
  m.push_back(TestFunction(
      "c2_cart", n,
      [c, s](const Point& x, Point& g) {
        const Point d = x - c;
        const double u = 1.0 - d.squaredNorm() / (s * s);
        g = d * (-2.0 / (s * s) * smoothstep5_deriv(u));
        return smoothstep5(u);
      },
      {"bump", "compact", "mixed"}, {SupportKind::inside_ball, 0.5 + s}, true, 0.0));
}

TestFunction random_mixture(int n, int idx, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> amp(-1.0, 1.0), pos(-2.0, 2.0), wid(0.7, 2.0);
  struct Term {
    double a, s;
    Point c;
  };
  std::vector<Term> terms;
  for (int k = 0; k < 3; ++k) {
    Term t{amp(rng), 0.0, Point(n)};
    for (int j = 0; j < n; ++j) t.c(j) = pos(rng);
    t.s = wid(rng);
    terms.push_back(t);
  }
  Point v(n);
  for (int j = 0; j < n; ++j) v(j) = amp(rng);
  v *= 0.7 / std::max(v.norm(), 1e-12);
  const double b = amp(rng);
  return TestFunction(
      "rand" + std::to_string(idx), n,
      [terms, v, b](const Point& x, Point& g) {
        g.setZero(x.size());
        double f = 0.0;
        for (const Term& t : terms) {
          const Point d = x - t.c;
          const double e = t.a * std::exp(-0.5 * d.squaredNorm() / (t.s * t.s));
          f += e;
          g -= d * (e / (t.s * t.s));
        }
        const double th = std::tanh(v.dot(x));
        f += b * th;
        g += v * (b * (1 - th * th));
        return f;
      },
      {"random", "mixed"}, {}, true, 0.0);
}

// Angular patterns Y(u) and their ambient gradients.
struct Pattern {
  std::string name;
  std::function<double(const Point&)> Y;
  std::function<Point(const Point&)> dY;
};

std::vector<Pattern> angular_patterns(int n) {
  const int l = n - 1;
  auto unit = [](int size, int k, double v) {
    Point p = Point::Zero(size);
    p(k) = v;
    return p;
  };
  std::vector<Pattern> p;
  p.push_back({"1", [](const Point&) { return 1.0; }, [](const Point& u) { return Point(Point::Zero(u.size())); }});
  p.push_back({"u0", [](const Point& u) { return u(0); }, [unit](const Point& u) { return unit(u.size(), 0, 1.0); }});
  p.push_back({"ul", [l](const Point& u) { return u(l); }, [unit, l](const Point& u) { return unit(u.size(), l, 1.0); }});
  p.push_back({"u0^2", [](const Point& u) { return u(0) * u(0); },
               [unit](const Point& u) { return unit(u.size(), 0, 2 * u(0)); }});
  p.push_back({"u0ul", [l](const Point& u) { return u(0) * u(l); },
               [l](const Point& u) {
                 Point g = Point::Zero(u.size());
                 g(0) += u(l);
                 g(l) += u(0);
                 return g;
               }});
  p.push_back({"u0^3", [](const Point& u) { return u(0) * u(0) * u(0); },
               [unit](const Point& u) { return unit(u.size(), 0, 3 * u(0) * u(0)); }});
  p.push_back({"exp_u0", [](const Point& u) { return std::exp(u(0)); },
               [unit](const Point& u) { return unit(u.size(), 0, std::exp(u(0))); }});
  p.push_back({"sin2u0+ul", [l](const Point& u) { return std::sin(2 * u(0)) + u(l); },
               [l](const Point& u) {
                 Point g = Point::Zero(u.size());
                 g(0) += 2 * std::cos(2 * u(0));
                 g(l) += 1;
                 return g;
               }});
  p.push_back({"(u0-0.3)^2", [](const Point& u) { return (u(0) - 0.3) * (u(0) - 0.3); },
               [unit](const Point& u) { return unit(u.size(), 0, 2 * (u(0) - 0.3)); }});
  p.push_back({"1/(2+u0)", [](const Point& u) { return 1.0 / (2.0 + u(0)); },
               [unit](const Point& u) { return unit(u.size(), 0, -1.0 / ((2.0 + u(0)) * (2.0 + u(0)))); }});
  return p;
}

}  // namespace

TestFunction band_times_angular(int n, std::string id, double r0, double r1, double r2, double r3,
                                std::function<double(const Point&)> Y, std::function<Point(const Point&)> dY,
                                std::vector<std::string> tags) {
  const Band b{r0, r1, r2, r3};
  const Support s = r0 >= 0 ? Support{SupportKind::outside_ball, r0} : Support{SupportKind::inside_ball, r3};
  return TestFunction(
      std::move(id), n,
      [b, Y, dY](const Point& x, Point& g) {
        const double r = x.norm();
        const double a = b.value(r);
        if (r == 0.0) {
          g.setZero(x.size());
          return a * Y(Point(Point::Zero(x.size())));
        }
        const Point u = x / r;
        const double y = Y(u);
        const double da = b.deriv(r);
        if (a == 0.0 && da == 0.0) {
          g.setZero(x.size());
          return 0.0;
        }
        const Point gy = dY(u);
        g = u * (da * y) + (gy - u * gy.dot(u)) * (a / r);
        return a * y;
      },
      std::move(tags), s, true, 0.0, b.breaks());
}

TestCorpus default_corpus(int n, std::uint64_t seed) {
  if (n < 1 || n > kMaxDim) throw DomainError("default_corpus: dimension out of range");
  TestCorpus c;
  c.seed = seed;
  auto& m = c.members;
  const int l = n - 1;

  for (int k = 0; k < n; ++k) m.push_back(linear_function(n, k));
  m.push_back(TestFunction(
      "quad_x0^2", n,
      [](const Point& x, Point& g) {
        g.setZero(x.size());
        g(0) = 2 * x(0);
        return x(0) * x(0);
      },
      {"quadratic"}, {}, false, 2.0));
  if (n >= 2) {
    m.push_back(TestFunction(
        "quad_x0xl", n,
        [l](const Point& x, Point& g) {
          g.setZero(x.size());
          g(0) = x(l);
          g(l) = x(0);
          return x(0) * x(l);
        },
        {"quadratic", "mixed"}, {}, false, 2.0));
    m.push_back(radial_function(
        n, "quad_r2", [](double r) { return r * r; }, [](double r) { return 2 * r; }, {"quadratic", "radial"},
        false, 2.0));
  }
  m.push_back(TestFunction(
      "cubic_x0", n,
      [](const Point& x, Point& g) {
        g.setZero(x.size());
        g(0) = 3 * x(0) * x(0) - 3;
        return x(0) * x(0) * x(0) - 3 * x(0);
      },
      {"cubic"}, {}, false, 3.0));

  Point c0 = Point::Zero(n), c1 = Point::Zero(n), c2(n);
  c1(0) = 0.8;
  for (int k = 0; k < n; ++k) c2(k) = (k % 2 == 0) ? 0.5 : -0.5;
  const std::vector<std::pair<Point, double>> placements = {{c0, 1.2}, {c1, 0.9}, {c2, 1.6}, {-1.5 * c1, 1.4}};
  for (const PolyDef& p : bump_polys(n)) {
    for (size_t k = 0; k < placements.size(); ++k)
      m.push_back(poly_bump(n, "pb_" + p.name + "_" + std::to_string(k), p.f, placements[k].first,
                            placements[k].second));
  }

  push_radial_members(m, n);

  m.push_back(TestFunction(
      "ang_x0_soft", n,
      [](const Point& x, Point& g) {
        const double q = 1.0 + x.squaredNorm();
        const double s = std::sqrt(q);
        g = x * (-x(0) / (q * s));
        g(0) += 1.0 / s;
        return x(0) / s;
      },
      {"angular", "mixed"}, {}, true, 0.0));
  if (n >= 2) {
    m.push_back(TestFunction(
        "ang_xl_soft", n,
        [l](const Point& x, Point& g) {
          const double q = 1.0 + x(l - 1) * x(l - 1) + x(l) * x(l);
          const double s = std::sqrt(q);
          g.setZero(x.size());
          g(l - 1) = -x(l) * x(l - 1) / (q * s);
          g(l) = 1.0 / s - x(l) * x(l) / (q * s);
          return x(l) / s;
        },
        {"angular", "mixed"}, {}, true, 0.0));
    m.push_back(TestFunction(
        "ang_quadrupole_soft", n,
        [](const Point& x, Point& g) {
          const double q = 1.0 + x.squaredNorm();
          const double p = x(0) * x(0) - x(1) * x(1);
          g = x * (-2.0 * p / (q * q));
          g(0) += 2 * x(0) / q;
          g(1) -= 2 * x(1) / q;
          return p / q;
        },
        {"angular", "mixed"}, {}, true, 0.0));
    // cos theta_1: bounded, gradient ~ 1/rho at the origin.
    m.push_back(TestFunction(
        "ang_cos_t1", n,
        [](const Point& x, Point& g) {
          const double r = x.norm();
          if (r == 0.0) {
            g.setZero(x.size());
            return 0.0;
          }
          g = x * (-x(0) / (r * r * r));
          g(0) += 1.0 / r;
          return x(0) / r;
        },
        {"angular", "origin_singular"}, {}, false, 0.0));
  }
  if (n == 2) {
    // cos and sin of the azimuth; in n >= 3 their Dirichlet energy diverges
    // along the polar axis.
    for (int k : {0, 1}) {
      m.push_back(TestFunction(
          k == 0 ? "ang_cos_az" : "ang_sin_az", n,
          [k](const Point& x, Point& g) {
            const double r = x.norm();
            if (r == 0.0) {
              g.setZero(x.size());
              return 0.0;
            }
            g = x * (-x(k) / (r * r * r));
            g(k) += 1.0 / r;
            return x(k) / r;
          },
          {"angular", "origin_singular"}, {}, false, 0.0));
    }
  }

  push_compact_members(m, n);

  std::mt19937_64 rng(seed);
  for (int k = 0; k < 10; ++k) m.push_back(random_mixture(n, k, rng));
  return c;
}

TestCorpus outside_ball_corpus(int n, double R, double outer, std::uint64_t seed) {
  if (!(outer > R)) throw DomainError("outside_ball_corpus: need outer > R");
  TestCorpus c;
  c.seed = seed;
  const double L = outer - R;
  const std::vector<std::array<double, 4>> bands = {
      {R + 0.05 * L, R + 0.3 * L, R + 0.3 * L, R + 0.6 * L},
      {R + 0.1 * L, R + 0.4 * L, R + 0.5 * L, R + 0.9 * L},
      {R + 0.3 * L, R + 0.6 * L, R + 0.6 * L, R + 1.0 * L},
      {R + 0.02 * L, R + 0.2 * L, R + 0.2 * L, R + 0.45 * L},
  };
  const auto pats = angular_patterns(n);
  for (size_t b = 0; b < bands.size(); ++b) {
    for (const Pattern& p : pats) {
      const auto& bd = bands[b];
      c.members.push_back(band_times_angular(n, "ob" + std::to_string(b) + "_" + p.name, bd[0], bd[1], bd[2],
                                             bd[3], p.Y, p.dY, {"boundary-supported", "bump", "mixed"}));
    }
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  for (int k = 0; k < 4; ++k) {
    const double a0 = ud(rng), a1 = ud(rng), a2 = ud(rng);
    const int l = n - 1;
    auto Y = [=](const Point& u) { return a0 * u(0) + a1 * u(l) + a2 * u(0) * u(0); };
    auto dY = [=](const Point& u) {
      Point g = Point::Zero(u.size());
      g(0) += a0 + 2 * a2 * u(0);
      g(l) += a1;
      return g;
    };
    const auto& bd = bands[k % bands.size()];
    c.members.push_back(band_times_angular(n, "ob_rand" + std::to_string(k), bd[0], bd[1], bd[2], bd[3], Y, dY,
                                           {"boundary-supported", "random", "mixed"}));
  }
  return c;
}

TestCorpus bounded_corpus(int n, double R, std::uint64_t seed) {
  TestCorpus c;
  c.seed = seed;
  for (TestFunction& f : default_corpus(n, seed).members) {
    // Bounded phi with bounded gradient; the soft angular members qualify.
    if (f.bounded() && f.growth() == 0.0) c.members.push_back(std::move(f));
  }
  const auto pats = angular_patterns(n);
  // Inside B_R, straddling R, and beyond R + 1.
  const std::vector<std::pair<std::string, std::array<double, 4>>> bands = {
      {"in", {-1.0, 0.0, 0.3 * R, 0.9 * R}},
      {"cross", {0.5 * R, 0.8 * R, 1.2 * R, 1.6 * R}},
      {"cross2", {0.2 * R, 0.9 * R, 1.0 * R, 2.0 * R}},
      {"tail", {R + 1.0, R + 1.5, R + 2.0, R + 3.0}},
  };
  for (const auto& [name, bd] : bands) {
    for (size_t k = 0; k < pats.size(); k += 3) {
      // A band reaching the origin times a non-constant angular factor is
      // discontinuous there, with a divergent Dirichlet form for n = 2.
      if (name == "in" && k > 0) break;
      const Pattern& p = pats[k];
      c.members.push_back(band_times_angular(n, "hy_" + name + "_" + p.name, bd[0], bd[1], bd[2], bd[3], p.Y,
                                             p.dY, {"bump", "mixed", name == "tail" ? "boundary-supported" : "bump"}));
    }
  }
  return c;
}

}  // namespace isofp
