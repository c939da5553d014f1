// Batch front door: residue tables, spacing statistics, equidistribution
// scans, rearrangement search, family builds and the maximal-average demo.
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "subavg/equidist.hpp"
#include "subavg/family.hpp"
#include "subavg/rearrange.hpp"
#include "subavg/residue.hpp"
#include "subavg/spacing.hpp"
#include "subavg/verify.hpp"

using namespace subavg;
using nlohmann::json;

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string config_hash(int argc, char** argv) {
  std::string all;
  for (int i = 0; i < argc; ++i) {
    all += argv[i];
    all += '\x1f';
  }
  std::ostringstream os;
  os << std::hex << fnv1a(all);
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::vector<i64> parse_i64_list(const std::string& csv) {
  std::vector<i64> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stoll(item));
  }
  return out;
}

std::vector<Rat> parse_rat_list(const std::string& csv) {
  std::vector<Rat> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_rat(item));
  }
  return out;
}

SequenceSpec make_seq(bool primes, int d) {
  SequenceSpec seq;
  seq.kind = primes ? SeqKind::kPrime : SeqKind::kPower;
  seq.exponent = d;
  seq.validate();
  return seq;
}

json rat_json(const Rat& r) { return rat_str(r); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"residue statistics, periodic rearrangements and maximal-average demos"};
  app.set_config("--config", "", "key=value config file; flags override")
      ->envname("SUBAVG_CONFIG");
  app.require_subcommand(1);

  std::string out_dir = ".";
  app.add_option("--out-dir", out_dir, "directory for report files")->capture_default_str();

  bool primes = false;
  int d = 2;
  app.add_flag("--primes", primes, "use the prime sequence");
  app.add_option("--d", d, "power exponent for n_k = k^d")->capture_default_str();

  // residues
  auto* c_res = app.add_subcommand("residues", "emit Lambda_t tables and CRT checks");
  i64 res_t = 0;
  c_res->add_option("--t", res_t, "modulus")->required();

  // spacing
  auto* c_spc = app.add_subcommand("spacing", "gap CDF tables F_q vs e^-theta");
  std::string spc_qs = "65,1105,32045";
  std::string spc_thetas = "1/4,1/2,3/4,1,5/4,3/2,7/4,2";
  std::string spc_gamma = "1/4";
  c_spc->add_option("--q", spc_qs, "comma list of moduli")->capture_default_str();
  c_spc->add_option("--thetas", spc_thetas, "comma list of thetas")->capture_default_str();
  c_spc->add_option("--gamma", spc_gamma, "gamma for the identity check")
      ->capture_default_str();

  // equidist
  auto* c_eq = app.add_subcommand("equidist", "residue-class scan and empirical N(Q)");
  i64 eq_q = 15;
  std::string eq_beta = "2/5";
  i64 eq_h = 100000;
  c_eq->add_option("--Q", eq_q, "modulus")->capture_default_str();
  c_eq->add_option("--beta", eq_beta, "threshold beta")->capture_default_str();
  c_eq->add_option("--H", eq_h, "scan horizon")->capture_default_str();

  // rearrange
  auto* c_re = app.add_subcommand("rearrange", "certified block-shift search");
  i64 re_t = 3, re_p = 101, re_budget = 10000;
  std::uint64_t re_seed = 1;
  c_re->add_option("--T", re_t, "inner period")->capture_default_str();
  c_re->add_option("--p", re_p, "outer factor")->capture_default_str();
  c_re->add_option("--seed", re_seed, "search seed")->capture_default_str();
  c_re->add_option("--budget", re_budget, "candidate budget")->capture_default_str();

  // build-family
  auto* c_bf = app.add_subcommand("build-family", "run the inductive construction");
  int bf_k = 1, bf_m = 1, bf_l = -1;
  std::string bf_gamma = "1/4", bf_alpha = "1/32", bf_delta = "1/4", bf_eps = "1/8",
              bf_beta = "2/5";
  i64 bf_a = 1, bf_dd = 1, bf_tcap = 10000000, bf_rtcap = 100000000,
      bf_horizon = 1000000, bf_budget = 10000;
  std::string bf_ppool, bf_qpool, bf_out = "family.fam";
  std::uint64_t bf_seed = 1;
  bool bf_pow2 = false;
  c_bf->add_option("--K", bf_k)->capture_default_str();
  c_bf->add_option("--M", bf_m)->capture_default_str();
  c_bf->add_option("--L", bf_l, "target L (default M)")->capture_default_str();
  c_bf->add_option("--gamma", bf_gamma)->capture_default_str();
  c_bf->add_option("--alpha", bf_alpha)->capture_default_str();
  c_bf->add_option("--delta", bf_delta)->capture_default_str();
  c_bf->add_option("--epsilon", bf_eps)->capture_default_str();
  c_bf->add_option("--beta", bf_beta)->capture_default_str();
  c_bf->add_option("--A", bf_a)->capture_default_str();
  c_bf->add_option("--D", bf_dd)->capture_default_str();
  c_bf->add_option("--t-cap", bf_tcap)->capture_default_str();
  c_bf->add_option("--rt-cap", bf_rtcap)->capture_default_str();
  c_bf->add_option("--scan-horizon", bf_horizon)->capture_default_str();
  c_bf->add_option("--omega-budget", bf_budget)->capture_default_str();
  c_bf->add_option("--p-pool", bf_ppool, "comma list")->required();
  c_bf->add_option("--q-pool", bf_qpool, "comma list")->required();
  c_bf->add_option("--seed", bf_seed)->capture_default_str();
  c_bf->add_option("--out", bf_out, "family container path")->capture_default_str();
  c_bf->add_flag("--s-pow2", bf_pow2, "use S = powers of two");

  // verify-family
  auto* c_vf = app.add_subcommand("verify-family", "exact verification of a container");
  std::string vf_path;
  c_vf->add_option("--family", vf_path)->required();

  // demo-maximal
  auto* c_dm = app.add_subcommand("demo-maximal", "two-step averaging certificate");
  std::string dm_path;
  i64 dm_samples = 10000, dm_ncap = 20000;
  c_dm->add_option("--family", dm_path)->required();
  c_dm->add_option("--samples", dm_samples)->capture_default_str();
  c_dm->add_option("--n-cap", dm_ncap)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  const std::string cfg_hash = config_hash(argc, argv);
  json provenance;
  provenance["config_hash"] = cfg_hash;

  try {
    const SequenceSpec seq = make_seq(primes, d);

    if (*c_res) {
      if (res_t <= 1) {
        std::cerr << "residues: modulus must be >= 2\n";
        return 2;
      }
      const ResidueSet lam = admissible_residues(seq, res_t);
      json j;
      j["provenance"] = provenance;
      j["modulus"] = res_t;
      j["kind"] = primes ? "prime" : ("power-" + std::to_string(d));
      j["elements"] = lam.elements;
      j["density"] = rat_json(lam.density());
      j["mean_spacing"] = rat_json(lam.mean_spacing());
      // CRT cross-check against the coprime factorization when composite
      json crt = json::array();
      for (i64 s = 2; s * s <= res_t; ++s) {
        if (res_t % s == 0 && gcd_i64(s, res_t / s) == 1) {
          const ResidueSet a = admissible_residues(seq, s);
          const ResidueSet b = admissible_residues(seq, res_t / s);
          const ResidueSet c = combine_crt(a, b);
          crt.push_back({{"s", s},
                         {"t", res_t / s},
                         {"match", c.elements == lam.elements}});
        }
      }
      j["crt_checks"] = crt;
      write_file(out_dir + "/residues.json", j.dump(2) + "\n");
      std::cout << j.dump(2) << "\n";
      for (const auto& c : j["crt_checks"])
        if (!c["match"].get<bool>()) return 1;
      return 0;
    }

    if (*c_spc) {
      const std::vector<i64> qs = parse_i64_list(spc_qs);
      const std::vector<Rat> thetas = parse_rat_list(spc_thetas);
      const Rat gamma = parse_rat(spc_gamma);
      json j;
      j["provenance"] = provenance;
      json rows = json::array();
      bool all_ok = true;
      for (i64 q : qs) {
        const ResidueSet lam = admissible_residues(seq, q);
        const SpacingProfile prof = SpacingProfile::from(lam);
        std::ostringstream csv;
        write_gap_cdf_csv(csv, prof, thetas);
        write_file(out_dir + "/spacing_q" + std::to_string(q) + ".csv", csv.str());
        const auto [lhs, rhs] = thickened_measure_identity(lam, gamma);
        all_ok = all_ok && lhs == rhs;
        double sup = 0;
        for (const Rat& th : thetas)
          sup = std::max(sup, std::abs(gap_cdf(prof, th).get_d() - std::exp(-th.get_d())));
        rows.push_back({{"q", q},
                        {"lambda_size", lam.size()},
                        {"identity_lhs", lhs},
                        {"identity_rhs", rhs},
                        {"sup_dev_vs_exp", sup}});
      }
      j["instances"] = rows;
      write_file(out_dir + "/spacing.json", j.dump(2) + "\n");
      std::cout << j.dump(2) << "\n";
      return all_ok ? 0 : 1;
    }

    if (*c_eq) {
      const Rat beta = parse_rat(eq_beta);
      const EquidistScan scan = scan_equidistribution(seq, eq_q, beta, eq_h);
      json j;
      j["provenance"] = provenance;
      j["Q"] = scan.Q;
      j["beta"] = rat_json(scan.beta);
      j["horizon"] = scan.horizon;
      j["empirical_N"] = scan.empirical_n;
      j["stabilized"] = scan.stabilized;
      json counts = json::array();
      for (const auto& [a, c] : scan.counts)
        counts.push_back({{"a", a},
                          {"count", c},
                          {"threshold", rat_json(beta * rat_of(scan.horizon) /
                                                 rat_of(static_cast<i64>(scan.counts.size())))}});
      j["counts"] = counts;
      write_file(out_dir + "/equidist.json", j.dump(2) + "\n");
      std::cout << j.dump(2) << "\n";
      if (!scan.stabilized)
        std::cerr << "warning: scan not stabilized; enlarge --H\n";
      return 0;
    }

    if (*c_re) {
      const ResidueSet lam = admissible_residues(seq, re_t * re_p);
      const OmegaSearch res = find_good_omega(re_t, re_p, lam, re_seed, re_budget);
      json j;
      j["provenance"] = provenance;
      j["T"] = re_t;
      j["p"] = re_p;
      j["found"] = res.found;
      j["candidates_tried"] = res.candidates_tried;
      j["worst_scaled_margin"] = res.worst_scaled_margin;
      j["worst_x"] = res.worst_x;
      j["worst_b"] = res.worst_b;
      if (res.found) j["plan"] = json::parse(res.plan.to_json());
      write_file(out_dir + "/rearrange.json", j.dump(2) + "\n");
      std::cout << j.dump(2) << "\n";
      return res.found ? 0 : 1;
    }

    if (*c_bf) {
      BuildConfig cfg;
      cfg.K = bf_k;
      cfg.M = bf_m;
      cfg.target_L = bf_l;
      cfg.params.K = bf_k;
      cfg.params.M = bf_m;
      cfg.params.gamma = parse_rat(bf_gamma);
      cfg.params.alpha = parse_rat(bf_alpha);
      cfg.params.delta = parse_rat(bf_delta);
      cfg.params.epsilon = parse_rat(bf_eps);
      cfg.params.beta = parse_rat(bf_beta);
      cfg.params.A = bf_a;
      cfg.params.D = bf_dd;
      cfg.params.t_cap = bf_tcap;
      cfg.params.rt_cap = bf_rtcap;
      cfg.params.scan_horizon = bf_horizon;
      cfg.params.S.kind = bf_pow2 ? SubsetRule::Kind::kPowersOfTwo
                                  : SubsetRule::Kind::kAllIntegers;
      cfg.pools.p_pool = parse_i64_list(bf_ppool);
      cfg.pools.q_pool = parse_i64_list(bf_qpool);
      cfg.seq = seq;
      cfg.seed = bf_seed;
      cfg.omega_budget = bf_budget;
      BuildResult res = build_family(cfg);
      res.log["provenance"] = provenance;
      write_file(out_dir + "/build_log.json", res.log.dump(2) + "\n");
      if (!res.ok) {
        std::cerr << "build failed: " << res.error << "\n";
        std::cout << res.log.dump(2) << "\n";
        return 1;
      }
      const std::vector<std::uint8_t> blob = family_to_cbor(res.family, res.log);
      std::ofstream out(bf_out, std::ios::binary);
      out.write(reinterpret_cast<const char*>(blob.data()),
                static_cast<std::streamsize>(blob.size()));
      std::cout << "family written to " << bf_out << " (T=" << res.family.T
                << ", R=" << res.family.R << ")\n";
      return 0;
    }

    if (*c_vf || *c_dm) {
      const std::string path = (*c_vf) ? vf_path : dm_path;
      std::ifstream in(path, std::ios::binary);
      if (!in) {
        std::cerr << "cannot open " << path << "\n";
        return 2;
      }
      std::vector<std::uint8_t> blob((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
      json log;
      const Family fam = family_from_cbor(blob, &log);
      QsetCatalog pools;
      pools.p_pool = log.value("p_pool", std::vector<i64>{});
      pools.q_pool = log.value("q_pool", std::vector<i64>{});
      PsiOracle psi(seq, pools, fam.params.beta, fam.params.scan_horizon, fam.params.S);

      if (*c_vf) {
        const VerificationReport rep = verify_family(fam, seq, psi);
        json j = rep.to_json();
        j["provenance"] = provenance;
        write_file(out_dir + "/verification.json", j.dump(2) + "\n");
        std::cout << j.dump(2) << "\n";
        return rep.pass ? 0 : 1;
      }

      const MaximalReport rep = demo_maximal(fam, seq, psi, dm_samples, dm_ncap);
      json j = rep.to_json();
      j["provenance"] = provenance;
      write_file(out_dir + "/maximal.json", j.dump(2) + "\n");
      std::ostringstream csv;
      write_maximal_csv(csv, rep);
      write_file(out_dir + "/maximal_samples.csv", csv.str());
      std::cout << j.dump(2) << "\n";
      return rep.worth_all_pass ? 0 : 1;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
