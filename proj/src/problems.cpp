#include "stagmls/problems.hpp"

#include <cctype>
#include <fstream>
#include <numbers>
#include <sstream>

namespace stagmls::problems {

namespace {

int next_pgm_token(std::istream& in) {
  // skips whitespace and '#' comments
  while (in) {
    const int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
  int v;
  if (!(in >> v)) throw Error("pgm: truncated header");
  return v;
}

}  // namespace

Raster load_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("pgm: cannot open " + path);
  std::string magic;
  in >> magic;
  if (magic != "P2" && magic != "P5") throw Error("pgm: unsupported format " + magic);

  Raster img;
  img.width = next_pgm_token(in);
  img.height = next_pgm_token(in);
  img.maxval = next_pgm_token(in);
  if (img.width <= 0 || img.height <= 0) throw Error("pgm: invalid dimensions");
  if (img.maxval <= 0 || img.maxval > 255) throw Error("pgm: maxval must be in [1, 255]");

  const std::size_t count = static_cast<std::size_t>(img.width) * img.height;
  img.pixels.resize(count);
  if (magic == "P5") {
    in.get();  // single whitespace after maxval
    in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(count));
    if (static_cast<std::size_t>(in.gcount()) != count) throw Error("pgm: truncated pixel data");
  } else {
    for (std::size_t k = 0; k < count; ++k) {
      int v;
      if (!(in >> v)) throw Error("pgm: truncated pixel data");
      if (v < 0 || v > img.maxval) throw Error("pgm: pixel out of range");
      img.pixels[k] = static_cast<std::uint8_t>(v);
    }
  }
  return img;
}

void save_pgm(const Raster& img, const std::string& path, bool binary) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("pgm: cannot write " + path);
  out << (binary ? "P5" : "P2") << "\n"
      << img.width << " " << img.height << "\n"
      << img.maxval << "\n";
  if (binary) {
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              static_cast<std::streamsize>(img.pixels.size()));
  } else {
    for (std::size_t k = 0; k < img.pixels.size(); ++k)
      out << static_cast<int>(img.pixels[k]) << ((k + 1) % 16 == 0 ? "\n" : " ");
    out << "\n";
  }
}

CoefficientField<2> raster_coefficient(const std::string& path, std::vector<GrayBin> mapping) {
  return CoefficientField<2>::raster(load_pgm(path), std::move(mapping), Vec<2>::Zero(),
                                     Vec<2>::Ones());
}

Problem<2> square_sine() {
  Problem<2> p;
  p.name = "square-sine";
  p.domain = Domain<2>::unit_square();
  p.phi_exact = [](const Vec<2>& x) { return std::sin(x[0]) * std::sin(x[1]); };
  p.grad_exact = [](const Vec<2>& x) {
    return Vec<2>(std::cos(x[0]) * std::sin(x[1]), std::sin(x[0]) * std::cos(x[1]));
  };
  p.source = [](const Vec<2>& x) { return 2.0 * std::sin(x[0]) * std::sin(x[1]); };
  p.dirichlet = p.phi_exact;
  p.neumann = [g = p.grad_exact](const Vec<2>& x, const Vec<2>& n) { return n.dot(g(x)); };
  return p;
}

Problem<2> annulus_sine() {
  Problem<2> p = square_sine();
  p.name = "annulus-sine";
  p.domain = Domain<2>::annulus(std::numbers::pi / 4.0, std::numbers::pi / 2.0);
  return p;
}

Problem<3> cylinder_sine() {
  Problem<3> p;
  p.name = "cylinder-sine";
  p.domain = Domain<3>::extruded_annulus(std::numbers::pi / 4.0, std::numbers::pi / 2.0,
                                         std::numbers::pi);
  p.phi_exact = [](const Vec<3>& x) { return std::sin(x[0]) * std::sin(x[1]) * std::sin(x[2]); };
  p.grad_exact = [](const Vec<3>& x) {
    return Vec<3>(std::cos(x[0]) * std::sin(x[1]) * std::sin(x[2]),
                  std::sin(x[0]) * std::cos(x[1]) * std::sin(x[2]),
                  std::sin(x[0]) * std::sin(x[1]) * std::cos(x[2]));
  };
  p.source = [](const Vec<3>& x) {
    return 3.0 * std::sin(x[0]) * std::sin(x[1]) * std::sin(x[2]);
  };
  p.dirichlet = p.phi_exact;
  p.neumann = [g = p.grad_exact](const Vec<3>& x, const Vec<3>& n) { return n.dot(g(x)); };
  return p;
}

Problem<2> five_strip_problem() {
  Problem<2> p;
  p.name = "five-strip";
  p.domain = Domain<2>::unit_square();
  p.mu = CoefficientField<2>::strips({0.2, 0.4, 0.6, 0.8}, {16.0, 6.0, 1.0, 10.0, 2.0});
  p.phi_exact = [](const Vec<2>& x) { return 1.0 - x[0]; };
  p.grad_exact = [](const Vec<2>&) { return Vec<2>(-1.0, 0.0); };
  p.source = [](const Vec<2>&) { return 0.0; };
  p.dirichlet = p.phi_exact;
  p.neumann = [mu = p.mu](const Vec<2>& x, const Vec<2>& n) { return -mu(x) * n[0]; };
  p.default_bc = PointKind::NeumannBoundary;
  return p;
}

Problem<2> dielectric_cylinder_problem(double mu_in, double mu_out) {
  // Cylinder of radius 1/2 centered in the unit square, uniform background
  // field grad(phi) = (1, 0). Matching phi and mu * d(phi)/dr across r = R
  // fixes the interior field 2 mu_out / (mu_in + mu_out) and the exterior
  // dipole coefficient (mu_out - mu_in) / (mu_in + mu_out).
  if (!(mu_in > 0.0 && mu_out > 0.0))
    throw Error("dielectric_cylinder_problem: permittivities must be positive");
  const Vec<2> c(0.5, 0.5);
  const double radius = 0.5;
  const double a = 2.0 * mu_out / (mu_in + mu_out);
  const double b = (mu_out - mu_in) / (mu_in + mu_out);

  Problem<2> p;
  p.name = "dielectric-cylinder";
  p.domain = Domain<2>::unit_square();
  p.mu = CoefficientField<2>::radial_two_phase(c, radius, mu_in, mu_out);
  p.phi_exact = [=](const Vec<2>& x) {
    const Vec<2> xi = x - c;
    const double r2 = xi.squaredNorm();
    if (r2 < radius * radius) return a * xi[0];
    return xi[0] * (1.0 + b * radius * radius / r2);
  };
  p.grad_exact = [=](const Vec<2>& x) {
    const Vec<2> xi = x - c;
    const double r2 = xi.squaredNorm();
    if (r2 < radius * radius) return Vec<2>(a, 0.0);
    const double k = b * radius * radius / (r2 * r2);
    return Vec<2>(1.0 + k * (xi[1] * xi[1] - xi[0] * xi[0]), -2.0 * k * xi[0] * xi[1]);
  };
  p.source = [](const Vec<2>&) { return 0.0; };
  p.dirichlet = p.phi_exact;
  p.neumann = [mu = p.mu, g = p.grad_exact](const Vec<2>& x, const Vec<2>& n) {
    return mu(x) * n.dot(g(x));
  };
  return p;
}

Problem<2> raster_problem(CoefficientField<2> mu) {
  Problem<2> p;
  p.name = "raster";
  p.domain = Domain<2>::unit_square();
  p.mu = std::move(mu);
  p.source = [](const Vec<2>&) { return 0.0; };
  p.dirichlet = [](const Vec<2>& x) { return 1.0 - x[0]; };
  p.neumann = [](const Vec<2>&, const Vec<2>&) { return 0.0; };
  return p;
}

}  // namespace stagmls::problems
