#include "report.hpp"

#include "gmsphere/version.hpp"

namespace gmsphere::report {

json to_json(const Quaternion& q) { return json::array({q.w, q.x, q.y, q.z}); }

json to_json(const ImQuaternion& v) { return json::array({v.x, v.y, v.z}); }

json to_json(const AlgebraElement& x) {
  return {{"p", to_json(x.p())}, {"q", to_json(x.q())}, {"h", to_json(x.h())}};
}

json to_json(const GroupElement& g) {
  json a = json::array();
  for (double r : to_reals(g)) a.push_back(r);
  return a;
}

json to_json(const MetricParams& m) { return {{"s_tilde", m.s_tilde}, {"t_tilde", m.t_tilde}}; }

json to_json(const ZResiduals& r) {
  return {{"a_norm", r.a_norm},
          {"b_norm", r.b_norm},
          {"c_norm", r.c_norm},
          {"d_norm", r.d_norm},
          {"det", r.det},
          {"w_value", r.w_value},
          {"w_norm", r.w_norm},
          {"norm_gap", r.norm_gap},
          {"half_gap", r.half_gap},
          {"im_a_ratio_margin", r.im_a_ratio_margin},
          {"im_a_margin", r.im_a_margin},
          {"im_b_margin", r.im_b_margin}};
}

json to_json(const ZWitness& w) {
  return {{"piece", w.piece},
          {"template", to_string(w.plane.type)},
          {"x", to_json(w.plane.x)},
          {"y", to_json(w.plane.y)},
          {"tilde_x", to_json(w.plane.tilde_x)},
          {"tilde_y", to_json(w.plane.tilde_y)},
          {"horizontality", w.horizontality},
          {"kappa", w.kappa}};
}

json to_json(const ZClassification& c) {
  json j = {{"z1", c.z1}, {"z2", c.z2}, {"z3", c.z3}, {"z4", c.z4}, {"any", c.any()},
            {"residuals", to_json(c.residuals)}};
  j["witness"] = c.witness ? to_json(*c.witness) : json(nullptr);
  return j;
}

json to_json(const MinResult& r) {
  return {{"value", r.value},
          {"x", to_json(r.x)},
          {"y", to_json(r.y)},
          {"starts", r.starts},
          {"iterations", r.iterations},
          {"converged_starts", r.converged_starts},
          {"status", to_string(r.status)}};
}

json to_json(const Calibration& c) {
  return {{"delta", c.delta},
          {"eps", c.eps},
          {"max_zero", c.max_zero},
          {"noise", c.noise},
          {"min_perturbed", c.min_perturbed},
          {"zero_points", c.zero_values.size()},
          {"perturbed_points", c.perturbed_values.size()}};
}

json to_json(const ScanPoint& p) {
  return {{"type", "sample"},
          {"index", p.index},
          {"seed", p.seed},
          {"kind", to_string(p.kind)},
          {"piece", p.piece},
          {"g", to_json(p.g)},
          {"min_kappa", p.min_kappa},
          {"min_secM", p.min_sec_m},
          {"z", json::array({p.z[0], p.z[1], p.z[2], p.z[3]})},
          {"agreement", p.agreement}};
}

json summary(const ScanReport& r) {
  json q = json::array(), f = json::array();
  for (const auto& [p, v] : r.quantiles) q.push_back({{"p", p}, {"value", v}});
  for (const auto& [k, v] : r.fraction_below) f.push_back({{"k", k}, {"fraction", v}});
  return {{"type", "summary"},
          {"samples", r.points.size()},
          {"threshold", r.config.threshold},
          {"objective", r.config.sec_m ? "min_secM" : "min_kappa"},
          {"hits", json::array({r.hits[0], r.hits[1], r.hits[2], r.hits[3]})},
          {"classifier_hits", r.classifier_hits},
          {"z1_z2_overlap", r.z1_z2_overlap},
          {"disagreements", r.disagreements},
          {"agreement_fraction", r.agreement_fraction()},
          {"quantiles", q},
          {"fraction_below", f},
          {"note", "Monte Carlo evidence for a measure-zero zero set, not a proof"}};
}

json to_json(const Check& c) {
  return {{"name", c.name},        {"subject", c.subject},     {"pass", c.pass},
          {"value", c.value},      {"tolerance", c.tolerance}, {"relation", c.relation},
          {"detail", c.detail},    {"informational", c.informational}};
}

json header(const std::string& command, const json& config, std::uint64_t seed, double tol_zero) {
  return {{"type", "header"},
          {"version", kVersion},
          {"command", command},
          {"config", config},
          {"seed", seed},
          {"tolerances",
           {{"tol_zero", tol_zero},
            {"witness_horizontality", 1e-8},
            {"witness_kappa", 1e-9},
            {"minimizer_gradient", 1e-12},
            {"unitarity", 1e-10}}}};
}

std::string csv_header() {
  std::string h = "index,seed";
  for (int i = 0; i < 16; ++i) h += ",g" + std::to_string(i);
  h += ",min_kappa,min_secM,z1,z2,z3,z4,agreement";
  return h;
}

std::string csv_row(const ScanPoint& p) {
  std::string row = std::to_string(p.index) + "," + std::to_string(p.seed) + "," + format_reals(p.g);
  row += "," + format_double(p.min_kappa) + "," + format_double(p.min_sec_m);
  for (bool z : p.z) row += z ? ",1" : ",0";
  row += p.agreement ? ",1" : ",0";
  return row;
}

}  // namespace gmsphere::report
