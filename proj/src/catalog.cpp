#include "affgeo/catalog.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace affgeo::catalog {

namespace {

constexpr double kPi = std::numbers::pi;

Vec vec2(double a, double b) { return (Vec(2) << a, b).finished(); }
Vec vec3(double a, double b, double c) { return (Vec(3) << a, b, c).finished(); }
Mat mat2(double a, double b, double c, double d) { return (Mat(2, 2) << a, b, c, d).finished(); }

// Build a bilinear map from component matrices: out^k(v, w) = vᵀ H[k] w.
BilinearMap from_components(const std::vector<Mat>& h) {
  const int n = static_cast<int>(h.front().rows());
  BilinearMap b(static_cast<int>(h.size()), n);
  for (int k = 0; k < static_cast<int>(h.size()); ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) b.at(k, i, j) = h[k](i, j);
  return b;
}

// Build a bilinear map by evaluating on basis pairs.
BilinearMap from_function(int n, const std::function<Vec(const Vec&, const Vec&)>& f) {
  BilinearMap b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Vec col = f(Vec::Unit(n, i), Vec::Unit(n, j));
      for (int k = 0; k < n; ++k) b.at(k, i, j) = col[k];
    }
  return b;
}

Chart everywhere(const ChartId& id, int n, double box) {
  return Chart(id, 0, [](const Vec&) { return 1.0; }, Vec::Constant(n, -box), Vec::Constant(n, box));
}

LocalField constant_field(const Vec& c) {
  const auto n = c.size();
  LocalField lf;
  lf.value = [c](const Vec&) -> Vec { return c; };
  lf.jacobian = [n](const Vec&) -> Mat { return Mat::Zero(n, n); };
  lf.hessian = [n](const Vec&) { return BilinearMap::zero(static_cast<int>(n), static_cast<int>(n)); };
  return lf;
}

LocalField linear_field(const Mat& a) {
  const int n = static_cast<int>(a.rows());
  LocalField lf;
  lf.value = [a](const Vec& x) -> Vec { return a * x; };
  lf.jacobian = [a](const Vec&) -> Mat { return a; };
  lf.hessian = [n](const Vec&) { return BilinearMap::zero(n, n); };
  return lf;
}

// (x₁², 0, ...)
LocalField quadratic_field(int n) {
  LocalField lf;
  lf.value = [n](const Vec& x) -> Vec {
    Vec out = Vec::Zero(n);
    out[0] = x[0] * x[0];
    return out;
  };
  lf.jacobian = [n](const Vec& x) -> Mat {
    Mat j = Mat::Zero(n, n);
    j(0, 0) = 2.0 * x[0];
    return j;
  };
  lf.hessian = [n](const Vec&) {
    BilinearMap b(n, n);
    b.at(0, 0, 0) = 2.0;
    return b;
  };
  return lf;
}

Mat rot90(int n) {
  Mat a = Mat::Zero(n, n);
  a(0, 1) = -1.0;
  a(1, 0) = 1.0;
  return a;
}

LocalConnection zero_connection(int n) {
  LocalConnection lc;
  lc.coefficients = [n](const Vec&) { return BilinearMap::zero(n, n); };
  lc.derivative = [n](const Vec&) { return std::vector<BilinearMap>(n, BilinearMap::zero(n, n)); };
  return lc;
}

// ---- plane_polar ----------------------------------------------------------

double polar_depth(const Vec& x) {
  const double r = x[0], th = x[1];
  if (!(r > 0.0) || !(std::abs(th) < kPi)) return -1.0;
  return std::min(r / (1.0 + r), (kPi - std::abs(th)) / kPi);
}

Transition cart_to_polar() {
  Transition t;
  t.map = [](const Vec& x) { return vec2(std::hypot(x[0], x[1]), std::atan2(x[1], x[0])); };
  t.jacobian = [](const Vec& x) -> Mat {
    const double r2 = x.squaredNorm(), r = std::sqrt(r2);
    return mat2(x[0] / r, x[1] / r, -x[1] / r2, x[0] / r2);
  };
  t.hessian = [](const Vec& x) {
    const double r2 = x.squaredNorm(), r = std::sqrt(r2), r3 = r2 * r, r4 = r2 * r2;
    const double a = x[0], b = x[1];
    Mat hr = mat2(b * b / r3, -a * b / r3, -a * b / r3, a * a / r3);
    Mat ht = mat2(2 * a * b / r4, (b * b - a * a) / r4, (b * b - a * a) / r4, -2 * a * b / r4);
    return from_components({hr, ht});
  };
  return t;
}

Transition polar_to_cart() {
  Transition t;
  t.map = [](const Vec& p) { return vec2(p[0] * std::cos(p[1]), p[0] * std::sin(p[1])); };
  t.jacobian = [](const Vec& p) -> Mat {
    const double c = std::cos(p[1]), s = std::sin(p[1]);
    return mat2(c, -p[0] * s, s, p[0] * c);
  };
  t.hessian = [](const Vec& p) {
    const double c = std::cos(p[1]), s = std::sin(p[1]), r = p[0];
    return from_components({mat2(0, -s, -s, -r * c), mat2(0, c, c, -r * s)});
  };
  return t;
}

// flat connection in (r, θ): Bʳ = r v_θ w_θ, B^θ = −(v_r w_θ + v_θ w_r)/r
LocalConnection polar_flat() {
  LocalConnection lc;
  lc.coefficients = [](const Vec& x) {
    const double r = x[0];
    return from_components({mat2(0, 0, 0, r), mat2(0, -1 / r, -1 / r, 0)});
  };
  lc.derivative = [](const Vec& x) {
    const double r = x[0];
    return std::vector<BilinearMap>{from_components({mat2(0, 0, 0, 1), mat2(0, 1 / (r * r), 1 / (r * r), 0)}),
                                    BilinearMap::zero(2, 2)};
  };
  return lc;
}

// ---- torus ----------------------------------------------------------------

struct TorusBox {
  ChartId id;
  Vec lo;
};

std::vector<TorusBox> torus_boxes() {
  return {{"t00", vec2(0, 0)}, {"t01", vec2(0, 0.5)}, {"t10", vec2(0.5, 0)}, {"t11", vec2(0.5, 0.5)}};
}

// ---- sphere ---------------------------------------------------------------

double stereo_depth(const Vec& u) { return 1.0 - u.norm() / 2.0; }

double colatlon_depth(const Vec& x) {
  const double th = x[0], ph = x[1];
  return std::min(std::min(th, kPi - th) / (kPi / 2.0), (kPi - std::abs(ph)) / kPi);
}

Transition sphere_transition(const ChartId& from, const ChartId& to) {
  Transition t;
  t.map = [from, to](const Vec& x) { return sphere_chart(to, sphere_embed(from, x)); };
  t.jacobian = [from, to](const Vec& x) -> Mat {
    return sphere_chart_jacobian(to, sphere_embed(from, x)) * sphere_embed_jacobian(from, x);
  };
  if ((from == "N" && to == "S") || (from == "S" && to == "N")) {
    // inversion u -> u / |u|²
    t.map = [](const Vec& u) -> Vec { return u / u.squaredNorm(); };
    t.jacobian = [](const Vec& u) -> Mat {
      const double r2 = u.squaredNorm();
      return (Mat::Identity(2, 2) * r2 - 2.0 * u * u.transpose()) / (r2 * r2);
    };
    t.hessian = [](const Vec& u) {
      const double r2 = u.squaredNorm(), r4 = r2 * r2, r6 = r4 * r2;
      BilinearMap b(2, 2);
      for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) {
            const double d = (j == k ? u[i] : 0.0) + (i == k ? u[j] : 0.0) + (i == j ? u[k] : 0.0);
            b.at(k, i, j) = -2.0 * d / r4 + 8.0 * u[i] * u[j] * u[k] / r6;
          }
      return b;
    };
  }
  return t;
}

// Round-metric coefficients in a stereographic chart:
// B(v,w) = 2/(1+|u|²) [ (u·v) w + (u·w) v − (v·w) u ]
LocalConnection round_stereo() {
  LocalConnection lc;
  lc.coefficients = [](const Vec& u) {
    const double c = 2.0 / (1.0 + u.squaredNorm());
    return from_function(2, [&](const Vec& v, const Vec& w) -> Vec {
      return c * (u.dot(v) * w + u.dot(w) * v - v.dot(w) * u);
    });
  };
  lc.derivative = [](const Vec& u) {
    const double d = 1.0 + u.squaredNorm();
    const double c = 2.0 / d;
    std::vector<BilinearMap> grad;
    for (int i = 0; i < 2; ++i) {
      const double dc = -4.0 * u[i] / (d * d);
      const Vec ei = Vec::Unit(2, i);
      grad.push_back(from_function(2, [&](const Vec& v, const Vec& w) -> Vec {
        Vec t = u.dot(v) * w + u.dot(w) * v - v.dot(w) * u;
        Vec dt = v[i] * w + w[i] * v - v.dot(w) * ei;
        return dc * t + c * dt;
      }));
    }
    return grad;
  };
  return lc;
}

// (θ, φ): B^θ = sinθ cosθ v_φ w_φ, B^φ = −cotθ (v_θ w_φ + v_φ w_θ)
LocalConnection round_colatlon() {
  LocalConnection lc;
  lc.coefficients = [](const Vec& x) {
    const double s = std::sin(x[0]), c = std::cos(x[0]), cot = c / s;
    return from_components({mat2(0, 0, 0, s * c), mat2(0, -cot, -cot, 0)});
  };
  lc.derivative = [](const Vec& x) {
    const double s = std::sin(x[0]);
    const double dsc = std::cos(2.0 * x[0]), dcot = 1.0 / (s * s);
    return std::vector<BilinearMap>{from_components({mat2(0, 0, 0, dsc), mat2(0, dcot, dcot, 0)}),
                                    BilinearMap::zero(2, 2)};
  };
  return lc;
}

// L_i(p) = p × e_i in each chart, with derivatives.
LocalField sphere_generator(const ChartId& chart, int i) {
  LocalField lf;
  if (chart == "N" || chart == "S") {
    const double sg = chart == "N" ? 1.0 : -1.0;  // S components are those of N with (u1u2, const) flipped
    switch (i) {
      case 0:
        lf.value = [sg](const Vec& u) {
          return vec2(sg * u[0] * u[1], sg * (1.0 - u[0] * u[0] + u[1] * u[1]) / 2.0);
        };
        lf.jacobian = [sg](const Vec& u) -> Mat { return sg * mat2(u[1], u[0], -u[0], u[1]); };
        lf.hessian = [sg](const Vec&) { return sg * from_components({mat2(0, 1, 1, 0), mat2(-1, 0, 0, 1)}); };
        break;
      case 1:
        lf.value = [sg](const Vec& u) {
          return vec2(-sg * (1.0 + u[0] * u[0] - u[1] * u[1]) / 2.0, -sg * u[0] * u[1]);
        };
        lf.jacobian = [sg](const Vec& u) -> Mat { return -sg * mat2(u[0], -u[1], u[1], u[0]); };
        lf.hessian = [sg](const Vec&) { return -sg * from_components({mat2(1, 0, 0, -1), mat2(0, 1, 1, 0)}); };
        break;
      default:
        lf = linear_field(mat2(0, 1, -1, 0));
        break;
    }
    return lf;
  }
  // colatlon (θ, φ)
  switch (i) {
    case 0:
      lf.value = [](const Vec& x) {
        return vec2(std::sin(x[1]), std::cos(x[1]) * std::cos(x[0]) / std::sin(x[0]));
      };
      lf.jacobian = [](const Vec& x) -> Mat {
        const double s = std::sin(x[0]), c = std::cos(x[0]), sp = std::sin(x[1]), cp = std::cos(x[1]);
        return mat2(0, cp, -cp / (s * s), -sp * c / s);
      };
      lf.hessian = [](const Vec& x) {
        const double s = std::sin(x[0]), c = std::cos(x[0]), sp = std::sin(x[1]), cp = std::cos(x[1]);
        return from_components(
            {mat2(0, 0, 0, -sp), mat2(2 * cp * c / (s * s * s), sp / (s * s), sp / (s * s), -cp * c / s)});
      };
      break;
    case 1:
      lf.value = [](const Vec& x) {
        return vec2(-std::cos(x[1]), std::sin(x[1]) * std::cos(x[0]) / std::sin(x[0]));
      };
      lf.jacobian = [](const Vec& x) -> Mat {
        const double s = std::sin(x[0]), c = std::cos(x[0]), sp = std::sin(x[1]), cp = std::cos(x[1]);
        return mat2(0, sp, -sp / (s * s), cp * c / s);
      };
      lf.hessian = [](const Vec& x) {
        const double s = std::sin(x[0]), c = std::cos(x[0]), sp = std::sin(x[1]), cp = std::cos(x[1]);
        return from_components(
            {mat2(0, 0, 0, cp), mat2(2 * sp * c / (s * s * s), -cp / (s * s), -cp / (s * s), -sp * c / s)});
      };
      break;
    default:
      lf = constant_field(vec2(0, -1));
      break;
  }
  return lf;
}

LocalField combine(const std::vector<LocalField>& parts, const Vec& w) {
  LocalField lf;
  lf.value = [parts, w](const Vec& x) -> Vec {
    Vec out = Vec::Zero(x.size());
    for (std::size_t i = 0; i < parts.size(); ++i)
      if (w[i] != 0.0) out += w[i] * parts[i].value(x);
    return out;
  };
  lf.jacobian = [parts, w](const Vec& x) -> Mat {
    Mat out = Mat::Zero(x.size(), x.size());
    for (std::size_t i = 0; i < parts.size(); ++i)
      if (w[i] != 0.0) out += w[i] * parts[i].jacobian(x);
    return out;
  };
  lf.hessian = [parts, w](const Vec& x) {
    const int n = static_cast<int>(x.size());
    BilinearMap out = BilinearMap::zero(n, n);
    for (std::size_t i = 0; i < parts.size(); ++i)
      if (w[i] != 0.0) out += w[i] * parts[i].hessian(x);
    return out;
  };
  return lf;
}

// conformal dilation, not Killing
LocalField sphere_dilation(const ChartId& chart) {
  if (chart == "N") return linear_field(Mat::Identity(2, 2));
  if (chart == "S") return linear_field(-Mat::Identity(2, 2));
  LocalField lf;
  lf.value = [](const Vec& x) { return vec2(std::sin(x[0]), 0.0); };
  lf.jacobian = [](const Vec& x) -> Mat { return mat2(std::cos(x[0]), 0, 0, 0); };
  lf.hessian = [](const Vec& x) { return from_components({mat2(-std::sin(x[0]), 0, 0, 0), mat2(0, 0, 0, 0)}); };
  return lf;
}

// ---- half plane -----------------------------------------------------------

// B(v,w) = (1/y)[v₂ w + w₂ v − (v·w) e₂]
LocalConnection hyperbolic() {
  auto t = [](const Vec& v, const Vec& w) -> Vec { return v[1] * w + w[1] * v - v.dot(w) * Vec::Unit(2, 1); };
  LocalConnection lc;
  lc.coefficients = [t](const Vec& x) {
    const double c = 1.0 / x[1];
    return from_function(2, [&](const Vec& v, const Vec& w) -> Vec { return c * t(v, w); });
  };
  lc.derivative = [t](const Vec& x) {
    const double dc = -1.0 / (x[1] * x[1]);
    return std::vector<BilinearMap>{
        BilinearMap::zero(2, 2), from_function(2, [&](const Vec& v, const Vec& w) -> Vec { return dc * t(v, w); })};
  };
  return lc;
}

// ---- construction ---------------------------------------------------------

AtlasPtr build(const std::string& name) {
  if (name == "plane" || name == "flat3") {
    const int n = name == "plane" ? 2 : 3;
    auto a = std::make_shared<Atlas>(name, n);
    a->add_chart(everywhere("id", n, name == "plane" ? 2.0 : 1.0));
    return a;
  }
  if (name == "plane_polar") {
    auto a = std::make_shared<Atlas>(name, 2);
    a->add_chart(everywhere("cart", 2, 2.0));
    a->add_chart(Chart("pol", 1, polar_depth, vec2(0.5, -2.5), vec2(2.0, 2.5)));
    a->add_transition("cart", "pol", cart_to_polar());
    a->add_transition("pol", "cart", polar_to_cart());
    return a;
  }
  if (name == "torus") {
    auto a = std::make_shared<Atlas>(name, 2);
    const auto boxes = torus_boxes();
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      const Vec lo = boxes[i].lo;
      auto depth = [lo](const Vec& x) {
        Vec d = (x - lo).cwiseMin(Vec::Ones(2) - (x - lo));
        return 2.0 * d.minCoeff();
      };
      a->add_chart(Chart(boxes[i].id, static_cast<int>(i), depth, lo + Vec::Constant(2, 0.1),
                         lo + Vec::Constant(2, 0.9)));
    }
    for (const auto& from : boxes)
      for (const auto& to : boxes) {
        if (from.id == to.id) continue;
        Transition t;
        const Vec lo = to.lo;
        // shift by the integer vector that lands in the target square
        t.map = [lo](const Vec& x) -> Vec {
          Vec y = x;
          for (int i = 0; i < 2; ++i) y[i] = lo[i] + (x[i] - lo[i] - std::floor(x[i] - lo[i]));
          return y;
        };
        t.jacobian = [](const Vec&) -> Mat { return Mat::Identity(2, 2); };
        t.hessian = [](const Vec&) { return BilinearMap::zero(2, 2); };
        a->add_transition(from.id, to.id, std::move(t));
      }
    return a;
  }
  if (name == "sphere") {
    auto a = std::make_shared<Atlas>(name, 2);
    a->add_chart(Chart("N", 0, stereo_depth, vec2(-1, -1), vec2(1, 1)));
    a->add_chart(Chart("S", 1, stereo_depth, vec2(-1, -1), vec2(1, 1)));
    a->add_chart(Chart("colatlon", 2, colatlon_depth, vec2(0.4, -2.7), vec2(2.7, 2.7)));
    const std::vector<ChartId> ids{"N", "S", "colatlon"};
    for (const auto& f : ids)
      for (const auto& t : ids)
        if (f != t) a->add_transition(f, t, sphere_transition(f, t));
    return a;
  }
  if (name == "halfplane") {
    auto a = std::make_shared<Atlas>(name, 2);
    a->add_chart(Chart("h", 0, [](const Vec& x) { return x[1] > 0.0 ? x[1] / (1.0 + x[1]) : -1.0; }, vec2(-1, 0.5),
                       vec2(1, 2)));
    return a;
  }
  if (name == "disk") {
    auto a = std::make_shared<Atlas>(name, 2);
    a->add_chart(Chart("id", 0, [](const Vec& x) { return 1.0 - x.norm(); }, vec2(-0.5, -0.5), vec2(0.5, 0.5)));
    return a;
  }
  if (name == "punctured_disk") {
    auto a = std::make_shared<Atlas>(name, 2);
    a->add_chart(Chart("id", 0, [](const Vec& x) { return 2.0 * std::min(1.0 - x.norm(), x.norm()); },
                       vec2(0.2, 0.2), vec2(0.55, 0.55)));
    return a;
  }
  throw Error(ErrorCode::UnknownCatalogName, "unknown manifold '" + name + "'");
}

}  // namespace

std::vector<std::string> manifold_names() {
  return {"plane", "plane_polar", "flat3", "torus", "sphere", "halfplane", "disk", "punctured_disk"};
}

AtlasPtr manifold(const std::string& name) {
  static std::mutex mu;
  static std::map<std::string, AtlasPtr> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(name);
  if (it != cache.end()) return it->second;
  AtlasPtr a = build(name);
  cache.emplace(name, a);
  return a;
}

std::string default_connection(const std::string& m) {
  if (m == "sphere") return "round";
  if (m == "halfplane") return "hyperbolic";
  manifold(m);  // validates
  return "flat";
}

std::vector<std::string> connection_names(const std::string& m) { return {default_connection(m)}; }

Connection connection(const std::string& name, const AtlasPtr& atlas) {
  const std::string& m = atlas->name();
  if (name != default_connection(m))
    throw Error(ErrorCode::UnknownCatalogName, "no connection '" + name + "' on manifold " + m);
  Connection conn(name + "@" + m, atlas, true);
  const int n = atlas->dim();
  for (const auto& chart : atlas->charts()) {
    const ChartId& id = chart.id();
    if (name == "flat") {
      conn.set_local(id, id == "pol" ? polar_flat() : zero_connection(n));
    } else if (name == "round") {
      conn.set_local(id, id == "colatlon" ? round_colatlon() : round_stereo());
    } else {
      conn.set_local(id, hyperbolic());
    }
  }
  return conn;
}

std::vector<std::string> field_names(const std::string& m) {
  if (m == "plane") return {"e1", "e2", "rotation", "linear", "quadratic"};
  if (m == "plane_polar") return {"e1", "rotation"};
  if (m == "flat3") return {"e1", "e2", "e3", "rotation_z", "linear", "quadratic"};
  if (m == "torus") return {"e1", "e2", "shear"};
  if (m == "sphere") return {"L1", "L2", "L3", "dilation"};
  if (m == "halfplane") return {"h_translation", "h_dilation", "h_special", "h_shear"};
  if (m == "disk") return {"e1", "quadratic"};
  if (m == "punctured_disk") return {"rotation", "e1"};
  throw Error(ErrorCode::UnknownCatalogName, "unknown manifold '" + m + "'");
}

VectorField field(const std::string& name, const AtlasPtr& atlas) {
  const std::string& m = atlas->name();
  const auto names = field_names(m);
  if (std::find(names.begin(), names.end(), name) == names.end())
    throw Error(ErrorCode::UnknownCatalogName, "no field '" + name + "' on manifold " + m);
  const int n = atlas->dim();
  VectorField f(name, atlas);

  if (m == "sphere") {
    if (name == "dilation") {
      for (const auto& c : atlas->charts()) f.set_local(c.id(), sphere_dilation(c.id()));
      return f;
    }
    Vec w = Vec::Zero(3);
    w[name[1] - '1'] = 1.0;
    VectorField r = sphere_rotation(atlas, w);
    return r.scaled(1.0, name);
  }
  if (m == "plane_polar") {
    if (name == "e1") {
      f.set_local("cart", constant_field(vec2(1, 0)));
      LocalField lf;
      lf.value = [](const Vec& x) { return vec2(std::cos(x[1]), -std::sin(x[1]) / x[0]); };
      lf.jacobian = [](const Vec& x) -> Mat {
        const double r = x[0], c = std::cos(x[1]), s = std::sin(x[1]);
        return mat2(0, -s, s / (r * r), -c / r);
      };
      lf.hessian = [](const Vec& x) {
        const double r = x[0], c = std::cos(x[1]), s = std::sin(x[1]);
        return from_components({mat2(0, 0, 0, -c), mat2(-2 * s / (r * r * r), c / (r * r), c / (r * r), s / r)});
      };
      f.set_local("pol", std::move(lf));
    } else {
      f.set_local("cart", linear_field(rot90(2)));
      f.set_local("pol", constant_field(vec2(0, 1)));
    }
    return f;
  }

  LocalField lf;
  if (name == "e1" || name == "e2" || name == "e3") {
    lf = constant_field(Vec::Unit(n, name[1] - '1'));
  } else if (name == "rotation" || name == "rotation_z") {
    lf = linear_field(rot90(n));
  } else if (name == "linear") {
    Mat a = Mat::Zero(n, n);
    if (n == 2) a = mat2(0.3, -1.0, 0.5, -0.2);
    else a << 0.3, -1.0, 0.0, 0.5, -0.2, 0.4, 0.0, 0.1, 0.6;
    lf = linear_field(a);
  } else if (name == "quadratic") {
    lf = quadratic_field(n);
  } else if (name == "shear") {
    const double k = 2.0 * kPi;
    lf.value = [k](const Vec& x) { return vec2(std::sin(k * x[1]), 0.0); };
    lf.jacobian = [k](const Vec& x) -> Mat { return mat2(0, k * std::cos(k * x[1]), 0, 0); };
    lf.hessian = [k](const Vec& x) {
      return from_components({mat2(0, 0, 0, -k * k * std::sin(k * x[1])), mat2(0, 0, 0, 0)});
    };
  } else if (name == "h_translation") {
    lf = constant_field(vec2(1, 0));
  } else if (name == "h_dilation") {
    lf = linear_field(Mat::Identity(2, 2));
  } else if (name == "h_special") {
    // z² ∂_z: (x² − y², 2xy)
    lf.value = [](const Vec& x) { return vec2(x[0] * x[0] - x[1] * x[1], 2 * x[0] * x[1]); };
    lf.jacobian = [](const Vec& x) -> Mat { return mat2(2 * x[0], -2 * x[1], 2 * x[1], 2 * x[0]); };
    lf.hessian = [](const Vec&) { return from_components({mat2(2, 0, 0, -2), mat2(0, 2, 2, 0)}); };
  } else if (name == "h_shear") {
    lf = linear_field(mat2(0, 1, 0, 0));
  }
  for (const auto& c : atlas->charts()) f.set_local(c.id(), lf);
  return f;
}

// ---- sphere helpers ---------------------------------------------------------

Vec sphere_embed(const ChartId& chart, const Vec& x) {
  if (chart == "colatlon") {
    const double s = std::sin(x[0]);
    return vec3(s * std::cos(x[1]), s * std::sin(x[1]), std::cos(x[0]));
  }
  const double r2 = x.squaredNorm(), d = 1.0 + r2;
  const double z = chart == "N" ? (1.0 - r2) / d : (r2 - 1.0) / d;
  return vec3(2 * x[0] / d, 2 * x[1] / d, z);
}

Mat sphere_embed_jacobian(const ChartId& chart, const Vec& x) {
  Mat j(3, 2);
  if (chart == "colatlon") {
    const double s = std::sin(x[0]), c = std::cos(x[0]), sp = std::sin(x[1]), cp = std::cos(x[1]);
    j << c * cp, -s * sp, c * sp, s * cp, -s, 0;
    return j;
  }
  const double d = 1.0 + x.squaredNorm();
  const double sg = chart == "N" ? -1.0 : 1.0;
  for (int i = 0; i < 2; ++i) {
    for (int k = 0; k < 2; ++k) j(k, i) = (k == i ? 2.0 / d : 0.0) - 4.0 * x[k] * x[i] / (d * d);
    j(2, i) = sg * 4.0 * x[i] / (d * d);
  }
  return j;
}

Vec sphere_chart(const ChartId& chart, const Vec& p) {
  if (chart == "colatlon") return vec2(std::atan2(std::hypot(p[0], p[1]), p[2]), std::atan2(p[1], p[0]));
  const double den = chart == "N" ? 1.0 + p[2] : 1.0 - p[2];
  return vec2(p[0] / den, p[1] / den);
}

Mat sphere_chart_jacobian(const ChartId& chart, const Vec& p) {
  Mat j(2, 3);
  if (chart == "colatlon") {
    const double rho2 = p[0] * p[0] + p[1] * p[1], rho = std::sqrt(rho2), n2 = rho2 + p[2] * p[2];
    // θ = atan2(ρ, z), φ = atan2(y, x)
    j << p[2] * p[0] / (rho * n2), p[2] * p[1] / (rho * n2), -rho / n2, -p[1] / rho2, p[0] / rho2, 0;
    return j;
  }
  const double sg = chart == "N" ? 1.0 : -1.0;
  const double den = 1.0 + sg * p[2];
  j << 1 / den, 0, -sg * p[0] / (den * den), 0, 1 / den, -sg * p[1] / (den * den);
  return j;
}

Point sphere_point(const AtlasPtr& atlas, const Vec& p) {
  Vec n = sphere_chart("N", p), s = sphere_chart("S", p);
  const double dn = atlas->chart("N").depth(n), ds = atlas->chart("S").depth(s);
  if (dn >= ds) return {"N", n};
  return {"S", s};
}

VectorField sphere_rotation(const AtlasPtr& atlas, const Vec& omega) {
  if (atlas->name() != "sphere") throw Error(ErrorCode::InvalidArgument, "sphere_rotation needs the sphere atlas");
  VectorField f("rotation", atlas);
  for (const auto& c : atlas->charts()) {
    std::vector<LocalField> parts{sphere_generator(c.id(), 0), sphere_generator(c.id(), 1),
                                  sphere_generator(c.id(), 2)};
    f.set_local(c.id(), combine(parts, omega));
  }
  return f;
}

Mat rotation_matrix(const Vec& rotvec) {
  const double angle = rotvec.norm();
  if (angle == 0.0) return Mat::Identity(3, 3);
  Eigen::Vector3d axis(rotvec[0] / angle, rotvec[1] / angle, rotvec[2] / angle);
  return Eigen::AngleAxisd(angle, axis).toRotationMatrix();
}

Diffeo sphere_rotation_map(const AtlasPtr& atlas, const Mat& r, const std::string& name) {
  ClosedMap m;
  m.map = [atlas, r](const Point& p) { return sphere_point(atlas, r * sphere_embed(p.chart, p.coords)); };
  m.jacobian = [atlas, r](const Point& p) -> Mat {
    Vec q = r * sphere_embed(p.chart, p.coords);
    Point y = sphere_point(atlas, q);
    return sphere_chart_jacobian(y.chart, q) * r * sphere_embed_jacobian(p.chart, p.coords);
  };
  const Mat rt = r.transpose();
  m.inverse = [atlas, rt](const Point& p) { return sphere_point(atlas, rt * sphere_embed(p.chart, p.coords)); };
  return Diffeo::closed_form(name, atlas, std::move(m));
}

}  // namespace affgeo::catalog
