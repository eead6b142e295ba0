// chaoslab command line driver. Every subcommand writes CSV/JSON artifacts and
// a manifest.json (config echo, seed, content hashes) into the output
// directory. Output location precedence: --out on the command line, then the
// CHAOSLAB_OUT environment variable, then `out` from the config file, then ".".

#include "chaoslab/chaining.hpp"
#include "chaoslab/chaos_lab.hpp"
#include "chaoslab/ensemble.hpp"
#include "chaoslab/io.hpp"
#include "chaoslab/norms.hpp"
#include "chaoslab/parallel.hpp"
#include "chaoslab/recovery.hpp"
#include "chaoslab/rip_lab.hpp"
#include "chaoslab/samplers.hpp"
#include "chaoslab/structured_ops.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace chaoslab;

namespace {

/// Files written so far; removed again if the run fails.
class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, const std::string& bytes) {
    fs::create_directories(dir_);
    write_file(dir_ / name, bytes);
    written_.push_back(name);
    hashes_.push_back(git_blob_sha256(bytes));
    sizes_.push_back(bytes.size());
  }

  void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }

  void finish(const std::string& subcommand, std::uint64_t seed, const std::string& echo) {
    json m;
    m["tool"] = "chaoslab";
    m["subcommand"] = subcommand;
    m["seed"] = seed;
    m["config"] = echo;
    json files = json::array();
    for (std::size_t i = 0; i < written_.size(); ++i) {
      files.push_back({{"file", written_[i]}, {"bytes", sizes_[i]}, {"sha256_blob", hashes_[i]}});
    }
    m["outputs"] = files;
    write_json("manifest.json", m);
  }

  void rollback() noexcept {
    for (const auto& name : written_) {
      std::error_code ec;
      fs::remove(dir_ / name, ec);
    }
    written_.clear();
  }

 private:
  fs::path dir_;
  std::vector<std::string> written_;
  std::vector<std::string> hashes_;
  std::vector<std::size_t> sizes_;
};

struct EnsembleOpts {
  std::string kind = "dense";
  std::string entries = "gaussian";
  double alpha = 2.0;
  std::size_t n = 64;
  std::size_t m = 32;

  void add(CLI::App* sc, bool with_m) {
    sc->add_option("--ensemble", kind, "dense | circulant | gabor | identity");
    sc->add_option("--entries", entries, "weibull | alpha_density | rademacher | gaussian");
    sc->add_option("--entries-alpha", alpha, "tail parameter of the entries");
    sc->add_option("--n", n, "column count (gabor: n = m^2)");
    if (with_m) sc->add_option("--m", m, "row count");
  }

  EnsembleSpec spec() const {
    EnsembleSpec e;
    e.kind = ensemble_kind_from_string(kind);
    e.entries = SamplerSpec{sampler_kind_from_string(entries), AlphaShape(alpha), true, 0.0};
    e.m = m;
    e.n = e.kind == EnsembleKind::gabor ? m * m : n;
    return e;
  }
};

std::string csv_text(const std::vector<std::string>& header,
                     const std::vector<std::vector<CsvWriter::Cell>>& rows) {
  std::ostringstream os;
  CsvWriter w(os, header);
  for (const auto& r : rows) w.row(r);
  return os.str();
}

using I64 = std::int64_t;

Matrix read_matrix_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    for (char& ch : line) if (ch == ',' || ch == ';' || ch == '\t') ch = ' ';
    std::istringstream ls(line);
    std::vector<double> row;
    double v;
    while (ls >> v) row.push_back(v);
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("matrix file " + path + " is empty");
  Matrix a(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size()) throw std::runtime_error("matrix file has ragged rows");
    for (std::size_t j = 0; j < rows[i].size(); ++j) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return a;
}

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, RngStream stream) {
  Matrix a(rows, cols);
  const Vector v = sample_gaussian(static_cast<std::size_t>(rows * cols), stream);
  std::copy(v.data(), v.data() + v.size(), a.data());
  return a;
}

Matrix named_matrix(const std::string& name, std::size_t n, const RngStream& stream) {
  const auto k = static_cast<Eigen::Index>(n);
  if (name == "identity") return Matrix::Identity(k, k);
  if (name == "rank1") {
    RngStream s = stream.child("rank1");
    Vector u = sample_gaussian(n, s);
    u.normalize();
    return u * u.transpose();
  }
  if (name == "random_symmetric") {
    const Matrix g = gaussian_matrix(k, k, stream.child("symmetric"));
    return (g + g.transpose()) / 2.0;
  }
  return read_matrix_csv(name);
}

json interval_json(const NormInterval& iv) {
  return {{"lo", iv.lo}, {"hi", iv.hi}, {"method", to_string(iv.method)}};
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::vector<double> linspace(double lo, double hi, std::size_t points) {
  std::vector<double> out(points);
  for (std::size_t i = 0; i < points; ++i) {
    out[i] = points == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  return out;
}

// ---------------------------------------------------------------------------
// sample

struct SampleCmd {
  std::string kind = "weibull";
  double alpha = 2.0;
  std::size_t count = 100000;
  bool standardized = false;
  std::vector<double> moments{1.0, 2.0, 4.0};

  void add(CLI::App* sc) {
    sc->add_option("--kind", kind, "weibull | alpha_density | rademacher | gaussian");
    sc->add_option("--alpha", alpha);
    sc->add_option("--count", count);
    sc->add_option("--standardized", standardized);
    sc->add_option("--moments", moments, "orders p of E|X|^p to tabulate");
  }

  void run(const RngStream& root, Outputs& out) const {
    const SamplerSpec spec{sampler_kind_from_string(kind), AlphaShape(alpha), standardized, 0.0};
    const Vector x = sample_blocks(spec, count, root);
    const double divisor = standardized ? standardization_divisor(spec) : 1.0;
    std::vector<std::vector<CsvWriter::Cell>> rows;
    for (double p : moments) {
      std::vector<double> v(count);
      for (std::size_t i = 0; i < count; ++i) v[i] = std::pow(std::abs(x(static_cast<Eigen::Index>(i))), p);
      const double mean = pairwise_sum(v) / static_cast<double>(count);
      for (double& e : v) e = (e - mean) * (e - mean);
      const double se = std::sqrt(pairwise_sum(v) / static_cast<double>(count - 1) / static_cast<double>(count));
      const double pop = population_abs_moment(spec.kind, spec.shape, p) / std::pow(divisor, p);
      rows.push_back({p, mean, se, pop});
    }
    out.write("moments.csv", csv_text({"p", "empirical", "se", "population"}, rows));
    std::vector<double> raw(x.data(), x.data() + x.size());
    json j;
    j["kind"] = to_string(spec.kind);
    j["alpha"] = alpha;
    j["standardized"] = standardized;
    j["count"] = count;
    j["mean"] = pairwise_sum(raw) / static_cast<double>(count);
    j["psi_alpha_estimate"] = finite_or_null(estimate_psi_alpha_norm(raw, spec.shape));
    j["psi_alpha_population"] =
        spec.kind == SamplerKind::weibull_symmetric ? json(std::pow(2.0, 1.0 / alpha) / divisor) : json(nullptr);
    out.write_json("sample_summary.json", j);
  }
};

// ---------------------------------------------------------------------------
// norms

struct NormsCmd {
  std::string matrix;
  std::size_t rows = 6, cols = 6;
  double alpha = 1.5;
  int restarts = 50;

  void add(CLI::App* sc) {
    sc->add_option("--matrix", matrix, "CSV matrix file; empty draws a Gaussian rows x cols matrix");
    sc->add_option("--rows", rows);
    sc->add_option("--cols", cols);
    sc->add_option("--alpha", alpha);
    sc->add_option("--restarts", restarts);
  }

  void run(const RngStream& root, Outputs& out) const {
    const Matrix a = matrix.empty() ? gaussian_matrix(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols),
                                                      root.child("matrix"))
                                    : read_matrix_csv(matrix);
    const AlphaShape shape(alpha);
    AscentOptions ascent;
    ascent.restarts = restarts;
    ascent.seed = root.child("ascent")();
    const ExactNorms ex = exact_norms(a);
    const SpectralNorm sp = spectral_norm(a);
    json j;
    j["rows"] = a.rows();
    j["cols"] = a.cols();
    j["alpha"] = alpha;
    j["alpha_star"] = finite_or_null(shape.alpha_star());
    j["frobenius"] = ex.frobenius;
    j["max_entry"] = ex.max_entry;
    j["l2_to_inf"] = ex.l2_to_inf;
    j["l1_to_inf"] = ex.l1_to_inf();
    j["lp_l2_alpha_star"] = ex.lp_l2(shape.alpha_star());
    j["spectral"] = {{"value", sp.value}, {"method", sp.method}, {"converged", sp.converged}};
    j["l2_to_l_alpha_star"] = interval_json(mixed_norm_interval(a, shape.alpha_star(), ascent));
    j["l_alpha_to_l_alpha_star"] = interval_json(dual_pair_norm_interval(a, shape, ascent));
    out.write_json("norms.json", j);
  }
};

// ---------------------------------------------------------------------------
// chaos-tails

struct ChaosTailsCmd {
  std::string matrix = "identity";
  std::size_t n = 16;
  double alpha = 2.0;
  std::string source = "weibull";
  bool standardized = true;
  std::size_t count = 100000;
  std::size_t points = 64;
  double quantile = 0.999;
  double c1 = 2.0, c2 = 1.0;
  std::vector<double> moments{2.0, 4.0, 8.0};

  void add(CLI::App* sc) {
    sc->add_option("--matrix", matrix, "identity | rank1 | random_symmetric | path to a CSV file");
    sc->add_option("--n", n);
    sc->add_option("--alpha", alpha);
    sc->add_option("--source", source);
    sc->add_option("--standardized", standardized);
    sc->add_option("--count", count);
    sc->add_option("--points", points);
    sc->add_option("--quantile", quantile, "largest t is this empirical quantile of |S - E S|");
    sc->add_option("--c1", c1, "tail prefactor C1");
    sc->add_option("--c2", c2, "exponent divisor C2");
    sc->add_option("--moments", moments);
  }

  void run(const RngStream& root, Outputs& out) const {
    const Matrix a = named_matrix(matrix, n, root.child("matrix"));
    const AlphaShape shape(alpha);
    const SamplerSpec src{sampler_kind_from_string(source), shape, standardized, 0.0};
    AscentOptions ascent;
    ascent.seed = root.child("ascent")();
    const ChaosNorms nm = chaos_norms(a, shape, ascent);
    const ChaosSampleSet chaos = chaos_samples(a, src, count, root.child("chaos"), matrix);
    std::vector<double> mags(chaos.values.size());
    for (std::size_t i = 0; i < mags.size(); ++i) mags[i] = std::abs(chaos.values[i]);
    std::sort(mags.begin(), mags.end());
    const double t_max = mags[std::min(mags.size() - 1, static_cast<std::size_t>(quantile * static_cast<double>(mags.size())))];
    TailCurve curve = empirical_tail(chaos, linspace(0.0, t_max, points));
    std::vector<std::vector<CsvWriter::Cell>> rows;
    for (std::size_t i = 0; i < curve.t.size(); ++i) {
      curve.bound[i] = c1 * std::exp(-hw_phi2(nm, shape, curve.t[i]) / c2);
      rows.push_back({curve.t[i], curve.empirical[i], curve.bound[i]});
    }
    out.write("tail.csv", csv_text({"t", "empirical", "bound"}, rows));

    const ChaosSampleSet dec = decoupled_samples(a, src, count, root.child("decoupled"), matrix);
    rows.clear();
    for (double p : moments) {
      const LpEstimate lp = empirical_lp(dec, p);
      const MomentFormula f = decoupled_moment_formula(nm, shape, p);
      rows.push_back({p, lp.value, static_cast<I64>(lp.reliable), f.five_term, f.two_term});
    }
    out.write("moments.csv", csv_text({"p", "empirical_lp", "reliable", "five_term", "two_term"}, rows));
    json j;
    j["matrix"] = matrix;
    j["n"] = a.rows();
    j["alpha"] = alpha;
    j["count"] = count;
    j["constants"] = {{"C1", c1}, {"C2", c2}};
    j["norms"] = {{"frobenius", nm.frobenius},
                  {"spectral", nm.spectral},
                  {"l_alpha_star_l2", nm.lstar_l2},
                  {"l2_to_l_alpha_star_hi", nm.two_to_star_hi},
                  {"l_alpha_to_l_alpha_star_hi", nm.alpha_to_star_hi}};
    out.write_json("chaos_summary.json", j);
  }
};

// ---------------------------------------------------------------------------
// hw-bound

struct HwBoundCmd {
  std::string family = "vx_circulant";
  std::size_t n = 64, m = 16, s = 2, size = 16;
  double alpha = 2.0;
  std::string gamma = "dudley";
  double c_cov = 1.0, gamma_constant = 1.0;
  double c_alpha = 1.0, c1_alpha = 1.0, psi_l = 1.0;
  std::size_t mc_count = 2000;
  std::size_t points = 32;
  double t_max = 10.0;

  void add(CLI::App* sc) {
    sc->add_option("--family", family, "identity | vx_circulant");
    sc->add_option("--n", n);
    sc->add_option("--m", m);
    sc->add_option("--s", s);
    sc->add_option("--size", size, "number of random s-sparse members (vx_circulant)");
    sc->add_option("--alpha", alpha);
    sc->add_option("--gamma", gamma, "dudley | closed_form | empirical");
    sc->add_option("--c-cov", c_cov);
    sc->add_option("--gamma-constant", gamma_constant);
    sc->add_option("--c-alpha", c_alpha);
    sc->add_option("--c1-alpha", c1_alpha);
    sc->add_option("--psi-l", psi_l);
    sc->add_option("--mc-count", mc_count);
    sc->add_option("--points", points);
    sc->add_option("--t-max", t_max);
  }

  void run(const RngStream& root, Outputs& out) const {
    const AlphaShape shape(alpha);
    std::vector<Matrix> fam;
    if (family == "identity") {
      fam.push_back(Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
    } else if (family == "vx_circulant") {
      std::vector<std::size_t> omega(m);
      for (std::size_t i = 0; i < m; ++i) omega[i] = i;
      for (std::size_t k = 0; k < size; ++k) {
        RngStream ks = root.child("member").child(k);
        const auto support = random_support(n, s, ks);
        Vector x = Vector::Zero(static_cast<Eigen::Index>(n));
        const Vector vals = sample_gaussian(s, ks);
        for (std::size_t i = 0; i < s; ++i) x(static_cast<Eigen::Index>(support[i])) = vals(static_cast<Eigen::Index>(i));
        x.normalize();
        fam.push_back(build_vx_circulant(x, omega).real());
      }
    } else {
      throw std::invalid_argument("unknown family: " + family);
    }
    GammaInput gi;
    if (gamma == "dudley") {
      gi.source = GammaSource::dudley;
      if (family == "vx_circulant") {
        gi.model = CoverModel::circulant_family(static_cast<double>(s), static_cast<double>(n),
                                                static_cast<double>(m), c_cov);
        gi.u_max = std::sqrt(static_cast<double>(s) / static_cast<double>(m));
      }
    } else if (gamma == "closed_form") {
      gi.source = GammaSource::closed_form;
      gi.s = static_cast<double>(s);
      gi.n = static_cast<double>(n);
      gi.m = static_cast<double>(m);
      gi.constant = gamma_constant;
    } else if (gamma == "empirical") {
      gi.source = GammaSource::dudley;
    } else {
      throw std::invalid_argument("unknown gamma source: " + gamma);
    }
    SuiteOptions so;
    so.mc_count = mc_count;
    so.constants = {c_alpha, c1_alpha, psi_l};
    so.ascent.seed = root.child("ascent")();
    const DeviationSuite suite = deviation_bound_suite(fam, shape, gi, linspace(0.0, t_max, points), root.child("suite"), so);
    const BoundReport& r = suite.report;
    const auto mc = [](const McEstimate& e) { return json{{"mean", e.mean}, {"se", e.se}}; };
    json j;
    j["family"] = family;
    j["net_size"] = r.net_size;
    j["alpha"] = alpha;
    j["M_F"] = r.m_f;
    j["M_2_2"] = r.m_22;
    j["M_2_alpha_star_hi"] = r.m_2star;
    j["Gamma"] = r.gamma;
    j["T"] = r.t_a;
    j["U1"] = r.u1;
    j["U2"] = r.u2;
    j["U3"] = r.u3;
    j["U2_prime"] = r.u2_prime;
    j["U3_prime"] = r.u3_prime;
    j["sup_AtA_frobenius"] = r.sup_ata_frobenius;
    j["E_sup_bilinear"] = mc(r.expectations.bilinear);
    j["E_sup_Aeta_2"] = mc(r.expectations.aeta_2);
    j["E_sup_Aeta_alpha_star"] = mc(r.expectations.aeta_star);
    j["constants"] = {{"C_alpha", c_alpha}, {"C1_alpha", c1_alpha}, {"L", psi_l}};
    out.write_json("bound_report.json", j);
    std::vector<std::vector<CsvWriter::Cell>> rows;
    for (const auto& p : suite.curve) rows.push_back({p.t, p.threshold_14, p.rhs_14, p.threshold_16, p.rhs_16});
    out.write("deviation_curves.csv", csv_text({"t", "threshold_14", "rhs_14", "threshold_16", "rhs_16"}, rows));
  }
};

// ---------------------------------------------------------------------------
// gamma

struct GammaCmd {
  std::string model = "circulant";
  double alpha = 2.0;
  double s = 4, n = 1024, m = 256;
  double c_cov = 1.0, constant = 1.0, c1 = 1.0, delta = 0.5;
  double u_max = 0.0;
  std::size_t points = 128;
  std::vector<double> s_list{1, 2, 4, 8, 16};

  void add(CLI::App* sc) {
    sc->add_option("--model", model, "circulant | gabor | sparse_ball | euclidean");
    sc->add_option("--alpha", alpha);
    sc->add_option("--s", s);
    sc->add_option("--n", n);
    sc->add_option("--m", m);
    sc->add_option("--c-cov", c_cov);
    sc->add_option("--constant", constant, "closed-form gamma constant C");
    sc->add_option("--c1", c1, "sample-complexity constant c1");
    sc->add_option("--delta", delta);
    sc->add_option("--u-max", u_max, "integration range; 0 picks sqrt(s/m) (structured) or 1");
    sc->add_option("--points", points);
    sc->add_option("--s-list", s_list);
  }

  void run(const RngStream&, Outputs& out) const {
    CoverModel cm;
    double nn = n;
    if (model == "circulant") cm = CoverModel::circulant_family(s, n, m, c_cov);
    else if (model == "gabor") cm = CoverModel::gabor_family(s, m, c_cov), nn = m * m;
    else if (model == "sparse_ball") cm = CoverModel::sparse_ball(s, n);
    else if (model == "euclidean") cm = CoverModel::euclidean_ball(n);
    else throw std::invalid_argument("unknown cover model: " + model);
    const bool structured = model == "circulant" || model == "gabor";
    const double range = u_max > 0 ? u_max : (structured ? std::sqrt(s / m) : 1.0);
    std::vector<std::vector<CsvWriter::Cell>> rows;
    for (const auto& p : dudley_trace(alpha, cm, range, static_cast<int>(points))) {
      rows.push_back({p.u, p.log_cover, p.integrand});
    }
    out.write("gamma_trace.csv", csv_text({"u", "log_cover", "integrand"}, rows));
    rows.clear();
    for (double sv : s_list) {
      const SampleComplexity sc = sample_complexity(alpha, sv, nn, delta, c1);
      rows.push_back({sv, nn, sc.f1, sc.f2, sc.m_required});
    }
    out.write("complexity.csv", csv_text({"s", "n", "f1", "f2", "m_required"}, rows));
    json j;
    j["model"] = model;
    j["alpha"] = alpha;
    j["s"] = s;
    j["n"] = nn;
    j["m"] = m;
    j["u_max"] = range;
    j["dudley"] = dudley_gamma(alpha, cm, range);
    if (structured) j["closed_form"] = closed_form_gamma(alpha, s, nn, m, constant);
    if (model == "circulant") {
      const double u = 1.0 / std::sqrt(m);
      const CirculantBranches b = circulant_branches(cm, u);
      j["splice"] = {{"u", u}, {"large_u_branch", b.large_u}, {"small_u_branch", b.small_u}};
    }
    out.write_json("gamma_summary.json", j);
  }
};

// ---------------------------------------------------------------------------
// rip-exact

struct RipExactCmd {
  EnsembleOpts ens;
  std::vector<std::size_t> s_list{1, 2};
  std::size_t draws = 1;
  double delta = 0.5;

  void add(CLI::App* sc) {
    ens.n = 16;
    ens.m = 8;
    ens.add(sc, true);
    sc->add_option("--s-list", s_list);
    sc->add_option("--draws", draws);
    sc->add_option("--delta", delta, "threshold for the success table");
  }

  void run(const RngStream& root, Outputs& out) const {
    const EnsembleSpec spec = ens.spec();
    std::vector<std::vector<CsvWriter::Cell>> rows, success;
    json witnesses = json::array();
    for (std::size_t s : s_list) {
      std::size_t ok = 0;
      for (std::size_t d = 0; d < draws; ++d) {
        RngStream ds = root.child(d).child("op");
        const MeasurementOperator op = spec.draw(ds);
        const RipResult r = delta_s_exact(op, s);
        ok += r.delta <= delta;
        rows.push_back({static_cast<I64>(d), static_cast<I64>(s), static_cast<I64>(spec.m), r.delta,
                        to_string(r.method), static_cast<I64>(r.supports_examined)});
        json w;
        w["draw"] = d;
        w["s"] = s;
        w["support"] = r.witness_support;
        json re = json::array(), im = json::array();
        for (Eigen::Index i = 0; i < r.witness.size(); ++i) re.push_back(r.witness(i).real()), im.push_back(r.witness(i).imag());
        w["vector_re"] = re;
        w["vector_im"] = im;
        witnesses.push_back(w);
      }
      const auto [lo, hi] = wilson_interval(ok, draws);
      success.push_back({static_cast<I64>(s), static_cast<I64>(spec.m), delta,
                         static_cast<double>(ok) / static_cast<double>(draws), lo, hi});
    }
    out.write("rip_exact.csv", csv_text({"draw", "s", "m", "delta_s", "method", "supports_examined"}, rows));
    out.write("rip_success.csv", csv_text({"s", "m", "delta", "success", "ci_lo", "ci_hi"}, success));
    out.write_json("rip_witness.json", witnesses);
  }
};

// ---------------------------------------------------------------------------
// rip-scan

struct RipScanCmd {
  EnsembleOpts ens;
  std::vector<std::size_t> s_list{2, 4};
  double delta = 0.8, target = 0.9;
  std::size_t draws = 20, mc_trials = 500;
  std::string method = "mc_lower";

  void add(CLI::App* sc) {
    ens.kind = "circulant";
    ens.entries = "rademacher";
    ens.n = 64;
    ens.add(sc, false);
    sc->add_option("--s-list", s_list);
    sc->add_option("--delta", delta);
    sc->add_option("--target", target);
    sc->add_option("--draws", draws);
    sc->add_option("--mc-trials", mc_trials);
    sc->add_option("--method", method, "mc_lower | exact");
  }

  void run(const RngStream& root, Outputs& out) const {
    EnsembleSpec spec = ens.spec();
    ScanOptions so;
    so.draws = draws;
    so.probe.mc_trials = mc_trials;
    if (method == "exact") so.probe.method = RipMethod::exact;
    else if (method == "mc_lower") so.probe.method = RipMethod::mc_lower;
    else throw std::invalid_argument("unknown method: " + method);
    const ScanResult res = minimal_m_scan(spec, s_list, delta, target, root, so);
    std::vector<std::vector<CsvWriter::Cell>> rows;
    for (const auto& r : res.rows) {
      rows.push_back({static_cast<I64>(r.s), static_cast<I64>(r.m_star), r.f1, r.ratio, static_cast<I64>(r.reached),
                      static_cast<I64>(r.probes), static_cast<I64>(r.split_votes)});
    }
    out.write("rip_scan.csv", csv_text({"s", "m_star", "f1", "ratio", "reached", "probes", "split_votes"}, rows));
    json j;
    j["ensemble"] = ens.kind;
    j["n"] = spec.n;
    j["delta"] = delta;
    j["target"] = target;
    j["method"] = to_string(so.probe.method);
    j["success_is_upper_estimate"] = so.probe.method == RipMethod::mc_lower;
    j["slope_ln_mstar_vs_ln_f1"] = res.slope;
    j["ratio_spread"] = res.ratio_spread;
    out.write_json("rip_scan.json", j);
  }
};

// ---------------------------------------------------------------------------
// recover / phase

struct RecoverCmd {
  EnsembleOpts ens;
  std::size_t s = 2, trials = 20;
  bool flat = false;

  void add(CLI::App* sc) {
    ens.add(sc, true);
    sc->add_option("--s", s);
    sc->add_option("--trials", trials);
    sc->add_option("--flat", flat, "unit-modulus values instead of Gaussian");
  }

  void run(const RngStream& root, Outputs& out) const {
    const EnsembleSpec spec = ens.spec();
    std::vector<TrialOutcome> res(trials);
    parallel_for(trials, [&](std::size_t t) { res[t] = recovery_trial(spec, s, root.child(t), {}, flat); });
    std::vector<std::vector<CsvWriter::Cell>> rows;
    std::size_t ok = 0;
    for (std::size_t t = 0; t < trials; ++t) {
      ok += res[t].success;
      rows.push_back({static_cast<I64>(t), static_cast<I64>(res[t].success), static_cast<I64>(res[t].converged),
                      res[t].error, static_cast<I64>(res[t].iterations)});
    }
    out.write("recover.csv", csv_text({"trial", "success", "converged", "error", "iterations"}, rows));
    const auto [lo, hi] = wilson_interval(ok, trials);
    out.write_json("recover_summary.json", {{"successes", ok}, {"trials", trials},
                                            {"rate", trials ? static_cast<double>(ok) / static_cast<double>(trials) : 0.0},
                                            {"ci_lo", lo}, {"ci_hi", hi}});
  }
};

struct PhaseCmd {
  EnsembleOpts ens;
  std::vector<std::size_t> m_grid{8, 16, 24, 32}, s_grid{1, 2, 4};
  std::size_t trials = 20;

  void add(CLI::App* sc) {
    ens.add(sc, false);
    sc->add_option("--m-grid", m_grid);
    sc->add_option("--s-grid", s_grid);
    sc->add_option("--trials", trials);
  }

  void run(const RngStream& root, Outputs& out) const {
    const auto cells = phase_transition(ens.spec(), m_grid, s_grid, trials, root);
    std::vector<std::vector<CsvWriter::Cell>> rows;
    for (const auto& c : cells) {
      rows.push_back({static_cast<I64>(c.m), static_cast<I64>(c.s), static_cast<I64>(c.successes),
                      static_cast<I64>(c.trials), c.rate, c.ci_lo, c.ci_hi, static_cast<I64>(c.nonconverged)});
    }
    out.write("phase.csv",
              csv_text({"m", "s", "successes", "trials", "rate", "ci_lo", "ci_hi", "nonconverged"}, rows));
  }
};

/// Config echo for the manifest: the seed plus the selected subcommand's
/// settings. threads and out are left out since they never change results.
std::string config_echo(const CLI::App& app, const std::string& sub) {
  std::istringstream all(app.config_to_str(true, false));
  std::string line, echo;
  while (std::getline(all, line)) {
    if (line.rfind("seed=", 0) == 0 || line.rfind(sub + ".", 0) == 0) echo += line + "\n";
  }
  return echo;
}

bool flag_on_command_line(int argc, char** argv, const std::string& flag) {
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
  }
  return false;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chaoslab: structured random measurement and chaos experiments"};
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "TOML config file; command line flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.fallthrough();
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string out_dir = ".";
  bool print_config = false;
  app.add_option("--seed", seed, "master seed");
  app.add_option("--threads", threads, "worker threads (results do not depend on it)");
  app.add_option("--out", out_dir, "output directory (env CHAOSLAB_OUT overrides the config file)");
  app.add_flag("--print-config", print_config, "print the effective configuration as TOML and exit")
      ->configurable(false);

  SampleCmd sample_cmd;
  NormsCmd norms_cmd;
  ChaosTailsCmd tails_cmd;
  HwBoundCmd hw_cmd;
  GammaCmd gamma_cmd;
  RipExactCmd rip_exact_cmd;
  RipScanCmd rip_scan_cmd;
  RecoverCmd recover_cmd;
  PhaseCmd phase_cmd;
  sample_cmd.add(app.add_subcommand("sample", "sampler diagnostics and moment tables"));
  norms_cmd.add(app.add_subcommand("norms", "norm report for a matrix"));
  tails_cmd.add(app.add_subcommand("chaos-tails", "empirical chaos tails against the phi_2 bound"));
  hw_cmd.add(app.add_subcommand("hw-bound", "bound report and deviation curves for a matrix family"));
  gamma_cmd.add(app.add_subcommand("gamma", "Dudley traces, closed-form gamma, f1/f2 tables"));
  rip_exact_cmd.add(app.add_subcommand("rip-exact", "exact restricted isometry constants"));
  rip_scan_cmd.add(app.add_subcommand("rip-scan", "minimal m scan against f1"));
  recover_cmd.add(app.add_subcommand("recover", "basis pursuit recovery trials"));
  phase_cmd.add(app.add_subcommand("phase", "phase-transition success table"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  if (print_config) {
    std::cout << app.config_to_str(true, false);
    return 0;
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  if (!flag_on_command_line(argc, argv, "--out")) {
    if (const char* env = std::getenv("CHAOSLAB_OUT"); env && *env) out_dir = env;
  }
  set_num_threads(std::max(threads, 1u));
  Outputs outputs(out_dir);
  try {
    const RngStream root(seed, {sub});
    if (sub == "sample") sample_cmd.run(root, outputs);
    else if (sub == "norms") norms_cmd.run(root, outputs);
    else if (sub == "chaos-tails") tails_cmd.run(root, outputs);
    else if (sub == "hw-bound") hw_cmd.run(root, outputs);
    else if (sub == "gamma") gamma_cmd.run(root, outputs);
    else if (sub == "rip-exact") rip_exact_cmd.run(root, outputs);
    else if (sub == "rip-scan") rip_scan_cmd.run(root, outputs);
    else if (sub == "recover") recover_cmd.run(root, outputs);
    else if (sub == "phase") phase_cmd.run(root, outputs);
    outputs.finish(sub, seed, config_echo(app, sub));
  } catch (const std::exception& e) {
    outputs.rollback();
    std::cerr << "chaoslab " << sub << ": " << e.what() << "\n";
    return 2;
  }
  return 0;
}
