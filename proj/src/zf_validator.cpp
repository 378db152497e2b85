#include "selfbh/zf_validator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace selfbh {

namespace {

using CMat = Eigen::MatrixXcd;

// Substream tags keep the different uses of one seed independent.
enum class Stream : std::uint32_t { Channel = 1, Wishart = 2, Noise = 3 };

std::mt19937_64 substream(std::uint64_t seed, Stream tag, std::uint64_t a,
                          std::uint64_t b = 0, std::uint64_t c = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tag),  static_cast<std::uint32_t>(a),
                    static_cast<std::uint32_t>(a >> 32), static_cast<std::uint32_t>(b),
                    static_cast<std::uint32_t>(c)};
  return std::mt19937_64(seq);
}

// Fills m with i.i.d. CN(0, 1) entries, column-major.
void fill_gaussian(CMat& m, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      m(i, j) = {re, im};
    }
  }
}

std::uint64_t draw_seed(std::uint64_t seed, std::uint64_t group, std::uint64_t trial,
                        std::uint64_t attempt) {
  auto rng = substream(seed, Stream::Channel, group, trial, attempt);
  return rng();
}

// Redraws allowed per trial before the trial counts as failed.
constexpr int kMaxAttempts = 20;

struct LinkSpec {
  const char* name;
  int antennas;       // transmit array (or receive array, roles swapped)
  int served;         // rows carrying a beam
  int nulls;          // rows that must see a null
  int signal_first;   // signal rows are served[signal_first, +signal_count)
  int signal_count;
  double gain;        // path gain of the signal rows
  double p_stream;    // power per signal stream
  double denominator; // noise plus interference power
  double closed_form;
};

std::vector<LinkSpec> link_table(const SystemParams& p, Scheme scheme,
                                 const PowerAllocation& a, const SinrSet& s) {
  const int k = p.k_d2d;
  const int dk = p.d - k;
  const int mt = p.m_bh_t;
  const int mr = p.m_bh_r;
  const double n0 = p.sigma_n2;
  auto per = [](double power, int streams) { return streams > 0 ? power / streams : 0.0; };

  std::vector<LinkSpec> links;
  switch (scheme) {
    case Scheme::FullDuplex: {
      const double iui = p.l_ud * ((p.u - k) * a.p_u + k * a.p_u_d2d);
      const double si = p.alpha * (a.p_d + a.p_bh_u);
      links = {
          {"dl", p.n_t, p.d + mt, p.n_r, 0, dk, p.l_ue, per(a.p_d, dk), n0 + iui, s.sinr_d},
          {"ul", p.n_r, p.u + mr, 0, 0, p.u, p.l_ue, a.p_u, n0 + si, s.sinr_u},
          {"bh_dl", p.n_r, p.u + mr, 0, p.u, mr, p.l_bh, per(a.p_bh_d, mr), n0 + si,
           s.sinr_bh_d},
          {"bh_ul", p.n_t, p.d + mt, p.n_r, p.d, mt, p.l_bh, per(a.p_bh_u, mt), n0,
           s.sinr_bh_u},
      };
      break;
    }
    case Scheme::HalfDuplex:
      links = {
          {"dl", p.n_t, dk + mt, 0, 0, dk, p.l_ue, per(a.p_d, dk), n0, s.sinr_d},
          {"ul", p.n_r, p.u + mr, 0, 0, p.u, p.l_ue, a.p_u, n0, s.sinr_u},
          {"bh_dl", p.n_r, p.u + mr, 0, p.u, mr, p.l_bh, per(a.p_bh_d, mr), n0, s.sinr_bh_d},
          {"bh_ul", p.n_t, dk + mt, 0, dk, mt, p.l_bh, per(a.p_bh_u, mt), n0, s.sinr_bh_u},
      };
      break;
    case Scheme::HybridRelay:
      links = {
          {"dl", p.n_t, dk, p.n_r, 0, dk, p.l_ue, per(a.p_d, dk), n0, s.sinr_d},
          {"ul", p.n_r, p.u, 0, 0, p.u, p.l_ue, a.p_u, n0 + p.alpha * a.p_bh_u, s.sinr_u},
          {"bh_dl", p.n_r, mr, 0, 0, mr, p.l_bh, per(a.p_bh_d, mr), n0 + p.alpha * a.p_d,
           s.sinr_bh_d},
          {"bh_ul", p.n_t, mt, k + p.n_r, 0, mt, p.l_bh, per(a.p_bh_u, mt), n0, s.sinr_bh_u},
      };
      break;
  }
  std::erase_if(links, [](const LinkSpec& l) { return l.signal_count <= 0; });
  return links;
}

double relative_error(double empirical, double reference) {
  if (reference == 0.0) return empirical == 0.0 ? 0.0 : std::abs(empirical);
  return std::abs(empirical - reference) / std::abs(reference);
}

}  // namespace

ChannelDraw draw_channel(int n_t, int n_r, int m_t, std::span<const double> gains,
                         std::uint64_t seed) {
  if (n_t <= 0 || m_t <= 0 || n_r < 0) {
    throw std::invalid_argument("draw_channel: dimensions must be positive");
  }
  if (gains.size() != static_cast<std::size_t>(m_t + n_r)) {
    throw std::invalid_argument("draw_channel: gains must have m_t + n_r entries");
  }
  std::mt19937_64 rng(seed);
  ChannelDraw draw;
  draw.gains.assign(gains.begin(), gains.end());
  draw.h_t.resize(m_t, n_t);
  draw.h_s.resize(n_r, n_t);
  fill_gaussian(draw.h_t, rng);
  fill_gaussian(draw.h_s, rng);
  for (int k = 0; k < m_t; ++k) draw.h_t.row(k) *= std::sqrt(gains[k]);
  for (int j = 0; j < n_r; ++j) draw.h_s.row(j) *= std::sqrt(gains[m_t + j]);
  return draw;
}

std::optional<PrecoderSample> zf_precoder(const ChannelDraw& draw, ZfMode mode) {
  const Eigen::Index n_t = draw.h_t.cols();
  const Eigen::Index m_t = draw.h_t.rows();
  const Eigen::Index n_r = mode == ZfMode::FdNull ? draw.h_s.rows() : 0;
  const Eigen::Index rows = m_t + n_r;
  if (n_t <= rows) {
    throw std::invalid_argument("zf_precoder: more stacked rows than transmit antennas");
  }

  CMat h(rows, n_t);
  h.topRows(m_t) = draw.h_t;
  if (n_r > 0) h.bottomRows(n_r) = draw.h_s;

  const Eigen::LLT<CMat> llt(h * h.adjoint());
  if (llt.info() != Eigen::Success || !(llt.rcond() * kMaxGramCondition >= 1.0)) {
    return std::nullopt;
  }
  // Only the served columns of H^H (H H^H)^{-1} are kept: Lambda is zero on
  // the null rows.
  const CMat selector = CMat::Identity(rows, m_t);
  PrecoderSample out;
  out.w = h.adjoint() * llt.solve(selector);
  out.lambda.resize(static_cast<std::size_t>(m_t));
  const double dof = static_cast<double>(n_t - rows);
  for (Eigen::Index k = 0; k < m_t; ++k) {
    const double lambda = std::sqrt(draw.gains[static_cast<std::size_t>(k)] * dof);
    out.lambda[static_cast<std::size_t>(k)] = lambda;
    out.w.col(k) *= lambda;
  }
  return out;
}

PrecoderResiduals precoder_residuals(const ChannelDraw& draw, const PrecoderSample& sample) {
  PrecoderResiduals r;
  const CMat ht_w = draw.h_t * sample.w;
  for (Eigen::Index k = 0; k < ht_w.cols(); ++k) {
    const double lambda = sample.lambda[static_cast<std::size_t>(k)];
    for (Eigen::Index j = 0; j < ht_w.rows(); ++j) {
      if (j == k) {
        r.max_diag_rel_err = std::max(r.max_diag_rel_err, std::abs(ht_w(j, k) - lambda) / lambda);
      } else {
        r.max_offdiag_rel = std::max(r.max_offdiag_rel, std::abs(ht_w(j, k)) / lambda);
      }
    }
  }
  if (draw.h_s.rows() > 0) {
    r.si_null_ratio = (draw.h_s * sample.w).norm() / draw.h_s.norm();
  }
  return r;
}

NormalizationReport normalization_check(int n_t, int m_t, int n_r,
                                        std::span<const double> gains, int trials,
                                        std::uint64_t seed, Execution exec) {
  if (trials <= 0) throw std::invalid_argument("normalization_check: trials must be positive");
  const auto n = static_cast<std::size_t>(trials);
  const auto cols = static_cast<std::size_t>(m_t);
  const ZfMode mode = n_r > 0 ? ZfMode::FdNull : ZfMode::Hd;

  std::vector<double> norms(n * cols, 0.0);  // column-major by column
  std::vector<PrecoderResiduals> residuals(n);
  std::vector<int> rejections(n, 0);
  std::vector<char> ok(n, 0);

  for_each_index(n, exec, [&](std::size_t t) {
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
      const ChannelDraw draw =
          draw_channel(n_t, n_r, m_t, gains, draw_seed(seed, 0, t, attempt));
      const auto sample = zf_precoder(draw, mode);
      if (!sample) {
        ++rejections[t];
        continue;
      }
      for (std::size_t k = 0; k < cols; ++k) {
        norms[k * n + t] = sample->w.col(static_cast<Eigen::Index>(k)).squaredNorm();
      }
      residuals[t] = precoder_residuals(draw, *sample);
      ok[t] = 1;
      return;
    }
  });

  NormalizationReport report;
  for (std::size_t t = 0; t < n; ++t) {
    report.rejected += rejections[t];
    if (!ok[t]) throw std::runtime_error("normalization_check: persistent rank deficiency");
    const PrecoderResiduals& r = residuals[t];
    report.worst.si_null_ratio = std::max(report.worst.si_null_ratio, r.si_null_ratio);
    report.worst.max_offdiag_rel = std::max(report.worst.max_offdiag_rel, r.max_offdiag_rel);
    report.worst.max_diag_rel_err = std::max(report.worst.max_diag_rel_err, r.max_diag_rel_err);
  }
  report.accepted = trials;
  report.max_residual = std::max({report.worst.si_null_ratio, report.worst.max_offdiag_rel,
                                  report.worst.max_diag_rel_err});
  for (std::size_t k = 0; k < cols; ++k) {
    report.column_mean_norm2.push_back(pairwise_sum(norms.data() + k * n, n) /
                                       static_cast<double>(n));
  }
  report.mean_norm2 = pairwise_sum(report.column_mean_norm2) / static_cast<double>(cols);
  return report;
}

WishartCheck wishart_trace_check(int n_t, int m, int trials, std::uint64_t seed,
                                 Execution exec) {
  if (m <= 0 || n_t <= m + 1 || trials <= 0) {
    throw std::invalid_argument("wishart_trace_check: requires n_t > m + 1 and trials > 0");
  }
  const auto n = static_cast<std::size_t>(trials);
  std::vector<double> traces(n);
  for_each_index(n, exec, [&](std::size_t t) {
    auto rng = substream(seed, Stream::Wishart, t);
    CMat h(m, n_t);
    fill_gaussian(h, rng);
    const Eigen::LLT<CMat> llt(h * h.adjoint());
    traces[t] = llt.solve(CMat::Identity(m, m)).trace().real();
  });
  WishartCheck out;
  out.empirical_mean = pairwise_sum(traces) / static_cast<double>(n);
  out.closed_form = static_cast<double>(m) / static_cast<double>(n_t - m);
  out.relative_error = relative_error(out.empirical_mean, out.closed_form);
  return out;
}

std::vector<SinrLinkCheck> empirical_sinr_check(const SystemParams& params, Scheme scheme,
                                                const PowerAllocation& alloc, int trials,
                                                std::uint64_t seed, Execution exec,
                                                std::string_view only_link) {
  if (trials < 1000) throw std::invalid_argument("empirical_sinr_check: trials must be >= 1000");
  require_valid_allocation(alloc);
  const RateModel model(scheme, params);
  std::vector<LinkSpec> links = link_table(params, scheme, alloc, model.sinr(alloc));
  if (!only_link.empty()) {
    std::erase_if(links, [&](const LinkSpec& l) { return l.name != only_link; });
  }

  // Noise samples come from a stream that depends only on (seed, trial), so
  // studies over different array sizes share them.
  constexpr int kNoiseSamples = 64;
  const auto n = static_cast<std::size_t>(trials);
  std::vector<double> unit_noise(n);
  for_each_index(n, exec, [&](std::size_t t) {
    auto rng = substream(seed, Stream::Noise, t);
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    double acc = 0.0;
    for (int i = 0; i < kNoiseSamples; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      acc += re * re + im * im;
    }
    unit_noise[t] = acc / kNoiseSamples;
  });
  const double noise_scale = pairwise_sum(unit_noise) / static_cast<double>(n);

  std::vector<SinrLinkCheck> out;
  for (std::size_t li = 0; li < links.size(); ++li) {
    const LinkSpec& link = links[li];
    std::vector<double> gains(static_cast<std::size_t>(link.served + link.nulls), 1.0);
    std::fill_n(gains.begin() + link.signal_first, link.signal_count, link.gain);
    const ZfMode mode = link.nulls > 0 ? ZfMode::FdNull : ZfMode::Hd;

    std::vector<double> signal(n, 0.0);
    std::vector<int> rejections(n, 0);
    std::vector<char> ok(n, 0);
    for_each_index(n, exec, [&](std::size_t t) {
      for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        const ChannelDraw draw = draw_channel(link.antennas, link.nulls, link.served, gains,
                                              draw_seed(seed, li + 1, t, attempt));
        const auto sample = zf_precoder(draw, mode);
        if (!sample) {
          ++rejections[t];
          continue;
        }
        // Each beam is rescaled to radiate exactly its stream power.
        double acc = 0.0;
        for (int k = link.signal_first; k < link.signal_first + link.signal_count; ++k) {
          const auto w = sample->w.col(k);
          acc += link.p_stream * std::norm((draw.h_t.row(k) * w).value()) /
                 w.squaredNorm();
        }
        signal[t] = acc / link.signal_count;
        ok[t] = 1;
        return;
      }
    });

    int rejected = 0;
    for (std::size_t t = 0; t < n; ++t) {
      rejected += rejections[t];
      if (!ok[t]) throw std::runtime_error("empirical_sinr_check: persistent rank deficiency");
    }
    if (rejected * 100 > trials) {
      throw std::runtime_error("empirical_sinr_check: more than 1% of draws rejected");
    }

    SinrLinkCheck check;
    check.link = link.name;
    check.antennas = link.antennas;
    check.stacked_rows = link.served + link.nulls;
    const double mean_signal = pairwise_sum(signal) / static_cast<double>(n);
    check.empirical = mean_signal == 0.0 ? 0.0 : mean_signal / (link.denominator * noise_scale);
    check.closed_form = link.closed_form;
    check.relative_error = relative_error(check.empirical, check.closed_form);
    out.push_back(check);
  }
  return out;
}

SystemParams scaled_validation_params(int n_t) {
  if (n_t <= 0 || n_t % 40 != 0) {
    throw std::invalid_argument("scaled_validation_params: n_t must be a positive multiple of 40");
  }
  const int s = n_t / 40;
  SystemParams p = SystemParams::reference();
  p.n_t = n_t;
  p.n_r = 16 * s;
  p.d = 4 * s;
  p.u = 4 * s;
  p.m_bh_t = 2 * s;
  p.m_bh_r = 4 * s;
  p.k_d2d = 0;
  p.k_an = 0;
  return p;
}

std::vector<ValidationRow> run_validation_suite(int trials, std::uint64_t seed, Execution exec) {
  std::vector<ValidationRow> rows;

  const std::vector<double> unit(20, 1.0);
  const NormalizationReport norm = normalization_check(40, 4, 16, unit, trials, seed, exec);
  rows.push_back({"zf_norm_mean_w2_40_4_16", norm.mean_norm2, 1.0,
                  relative_error(norm.mean_norm2, 1.0)});
  rows.push_back({"zf_si_null_ratio_max", norm.worst.si_null_ratio, 0.0,
                  norm.worst.si_null_ratio});
  rows.push_back({"zf_offdiag_rel_max", norm.worst.max_offdiag_rel, 0.0,
                  norm.worst.max_offdiag_rel});
  rows.push_back({"zf_diag_rel_err_max", norm.worst.max_diag_rel_err, 0.0,
                  norm.worst.max_diag_rel_err});

  for (auto [n_t, m] : {std::pair{40, 20}, std::pair{200, 16}}) {
    const WishartCheck w = wishart_trace_check(n_t, m, trials, seed, exec);
    rows.push_back({"wishart_trace_" + std::to_string(n_t) + "_" + std::to_string(m),
                    w.empirical_mean, w.closed_form, w.relative_error});
  }

  for (int n_t : {40, 80, 160}) {
    const SystemParams p = scaled_validation_params(n_t);
    PowerAllocation a;
    a.p_d = p.p_an_max / 2.0;
    a.p_bh_u = p.p_an_max / 2.0;
    a.p_u = p.p_ue_max;
    a.p_bh_d = p.p_bh_d_max;
    for (const SinrLinkCheck& c :
         empirical_sinr_check(p, Scheme::HalfDuplex, a, trials, seed, exec, "dl")) {
      rows.push_back({"hd_dl_sinr_nt" + std::to_string(n_t), c.empirical, c.closed_form,
                      c.relative_error});
    }
  }
  return rows;
}

}  // namespace selfbh
