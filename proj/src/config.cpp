#include "homog/config.hpp"

#include <fstream>

#include "json.hpp"

namespace homog {

KernelSpec kernel_from_name(const std::string& name) {
  if (name == "constant") return constant_kernel();
  if (name == "additive-cosine") return additive_cosine_kernel();
  if (name == "product-cosine") return product_cosine_kernel();
  throw std::invalid_argument("unknown kernel name: " + name);
}

StudyConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  nlohmann::json j;
  in >> j;

  StudyConfig cfg;
  if (j.contains("kernel")) {
    const auto& k = j["kernel"];
    if (k.is_string()) {
      cfg.kernel = kernel_from_name(k.get<std::string>());
    } else if (k.is_object() && k.contains("fourier")) {
      std::vector<FourierTerm> terms;
      for (const auto& t : k["fourier"]) {
        if (!t.is_array() || t.size() != 3)
          throw std::invalid_argument(
              "config: fourier terms must be [j, k, amp] triples");
        terms.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<double>()});
      }
      cfg.kernel = fourier_kernel(terms, k.value("name", "fourier"));
    } else if (k.is_object() && k.contains("name")) {
      cfg.kernel = kernel_from_name(k["name"].get<std::string>());
    } else {
      throw std::invalid_argument("config: malformed kernel entry");
    }
  } else {
    cfg.kernel = additive_cosine_kernel();
  }

  cfg.alpha = j.value("alpha", cfg.alpha);
  if (j.contains("domain")) {
    const auto& d = j["domain"];
    if (!d.is_array() || d.size() != 2)
      throw std::invalid_argument("config: domain must be [a, b]");
    cfg.domain = {d[0].get<double>(), d[1].get<double>()};
  }
  if (j.contains("eps_list"))
    cfg.eps_list = j["eps_list"].get<std::vector<double>>();
  cfg.grid_ratio = j.value("grid_ratio", cfg.grid_ratio);
  cfg.torus_n = j.value("torus_n", cfg.torus_n);
  cfg.image_cutoff = j.value("image_cutoff", cfg.image_cutoff);
  if (j.contains("rhs")) {
    const auto& r = j["rhs"];
    if (r.is_string()) {
      cfg.rhs_name = r.get<std::string>();
    } else if (r.is_object()) {
      cfg.rhs_name = "poly";
      cfg.rhs_power = r.value("poly_power", 3);
    }
  }
  cfg.ubar_name = j.value("ubar", cfg.ubar_name);
  if (j.contains("quadrature")) {
    const auto& q = j["quadrature"];
    cfg.quadrature.points_per_cell =
        q.value("points_per_cell", cfg.quadrature.points_per_cell);
    cfg.quadrature.tail_radius =
        q.value("tail_radius", cfg.quadrature.tail_radius);
    cfg.quadrature.rel_tol = q.value("rel_tol", cfg.quadrature.rel_tol);
  }
  cfg.seed = j.value("seed", cfg.seed);
  if (j.contains("mc")) {
    const auto& m = j["mc"];
    cfg.mc_paths = m.value("paths", cfg.mc_paths);
    cfg.mc_spot_nodes = m.value("spot_nodes", cfg.mc_spot_nodes);
  }
  if (j.contains("solve_eps") && !j["solve_eps"].is_null())
    cfg.solve_eps = j["solve_eps"].get<double>();

  cfg.validate();
  return cfg;
}

} // namespace homog
