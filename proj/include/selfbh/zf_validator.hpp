#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "selfbh/parallel.hpp"
#include "selfbh/rates.hpp"

namespace selfbh {

/// One Rayleigh-fading realization. Rows of h_t are the served receivers,
/// rows of h_s the receive antennas (or other receivers) that must see a
/// null. Row k is scaled by sqrt(gains[k]); h_s rows use gains[m_t + j].
struct ChannelDraw {
  Eigen::MatrixXcd h_t;  // m_t x n_t
  Eigen::MatrixXcd h_s;  // n_r x n_t, may be empty
  std::vector<double> gains;
};

/// Rows are i.i.d. CN(0, gains[k]). Throws std::invalid_argument unless
/// n_t, m_t > 0, n_r >= 0 and gains.size() == m_t + n_r.
ChannelDraw draw_channel(int n_t, int n_r, int m_t, std::span<const double> gains,
                         std::uint64_t seed);

enum class ZfMode {
  FdNull,  // stack h_t over h_s; W nulls every h_s row
  Hd,      // h_t only
};

struct PrecoderSample {
  Eigen::MatrixXcd w;          // n_t x m_t
  std::vector<double> lambda;  // normalization factor per column
};

/// Hard cap on the condition number of the stacked Gram matrix.
inline constexpr double kMaxGramCondition = 1e10;

/// W = H^H (H H^H)^{-1} Lambda via a Cholesky solve, with
/// lambda_k = sqrt(l_k (n_t - stacked rows)). Returns nullopt when the Gram
/// matrix is too ill-conditioned; the caller redraws. Throws
/// std::invalid_argument if n_t does not exceed the stacked row count.
std::optional<PrecoderSample> zf_precoder(const ChannelDraw& draw, ZfMode mode);

/// Per-realization exactness of H W = [Lambda; 0].
struct PrecoderResiduals {
  double si_null_ratio = 0.0;     // ||H_s W||_F / ||H_s||_F, 0 without h_s
  double max_offdiag_rel = 0.0;   // max |(H_t W)_{jk}| / lambda_k, j != k
  double max_diag_rel_err = 0.0;  // max |(H_t W)_{kk} - lambda_k| / lambda_k
};

PrecoderResiduals precoder_residuals(const ChannelDraw& draw, const PrecoderSample& sample);

struct NormalizationReport {
  std::vector<double> column_mean_norm2;  // E||w_k||^2 per column
  double mean_norm2 = 0.0;                // averaged over columns
  double max_residual = 0.0;              // worst of the three residual measures
  PrecoderResiduals worst;
  int accepted = 0;
  int rejected = 0;
};

/// Monte-Carlo check that the normalization keeps E||w_k||^2 = 1. Unequal
/// gains are allowed; the per-column means are reported without a bound.
NormalizationReport normalization_check(int n_t, int m_t, int n_r,
                                        std::span<const double> gains, int trials,
                                        std::uint64_t seed,
                                        Execution exec = Execution::Parallel);

struct WishartCheck {
  double empirical_mean = 0.0;
  double closed_form = 0.0;
  double relative_error = 0.0;
};

/// E[Trace((H H^H)^{-1})] for an m x n_t standard complex Gaussian H,
/// against m / (n_t - m). Requires n_t > m + 1 and trials > 0.
WishartCheck wishart_trace_check(int n_t, int m, int trials, std::uint64_t seed,
                                 Execution exec = Execution::Parallel);

struct SinrLinkCheck {
  std::string link;  // dl, ul, bh_dl or bh_ul
  int antennas = 0;
  int stacked_rows = 0;
  double empirical = 0.0;
  double closed_form = 0.0;
  double relative_error = 0.0;
};

/// For each link with at least one stream, measures the mean per-stream
/// signal power through a ZF beam normalized to the stream's power, divides
/// by the mean power of synthesized Gaussian noise-plus-interference and
/// compares with the closed-form SINR. Receive links reuse the transmit
/// machinery with the AN's receive array in place of the transmit array.
/// A non-empty only_link restricts the check to that link. Requires
/// trials >= 1000; throws std::runtime_error if more than 1% of the draws
/// are rejected.
std::vector<SinrLinkCheck> empirical_sinr_check(const SystemParams& params, Scheme scheme,
                                                const PowerAllocation& alloc, int trials,
                                                std::uint64_t seed,
                                                Execution exec = Execution::Parallel,
                                                std::string_view only_link = {});

/// Empirical / closed-form / error triple for reporting.
struct ValidationRow {
  std::string check;
  double empirical = 0.0;
  double closed_form = 0.0;
  double relative_error = 0.0;
};

/// Parameters used for the DL SINR convergence study: the reference system
/// shrunk to n_t transmit antennas with all counts scaled by n_t / 40.
SystemParams scaled_validation_params(int n_t);

/// The standard validation suite: normalization at (40, 4, 16), Wishart at
/// (40, 20) and (200, 16), HD DL SINR at n_t = 40, 80, 160.
std::vector<ValidationRow> run_validation_suite(int trials, std::uint64_t seed,
                                                Execution exec = Execution::Parallel);

}  // namespace selfbh
