#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "selfbh/rates.hpp"
#include "selfbh/sweep.hpp"

using namespace selfbh;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);) out.push_back(line);
  return out;
}

std::vector<std::string> fields_of(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  for (std::string f; std::getline(is, f, ',');) out.push_back(f);
  return out;
}

SweepSpec small_spec(std::string_view schemes) {
  std::string text = "kind = si_cancellation\naxis = 120\nn_starts = 4\nseed = 3\nschemes = ";
  text += schemes;
  text += "\n";
  return parse_sweep_spec(text);
}

}  // namespace

TEST_SUITE("sweep") {
  TEST_CASE("range and list axes") {
    const SweepSpec a = parse_sweep_spec("kind = si_cancellation\naxis = 60:70:2.5\n");
    REQUIRE(a.axis.size() == 5);
    CHECK(a.axis.front() == 60.0);
    CHECK(a.axis.back() == 70.0);
    const SweepSpec b = parse_sweep_spec("kind = backhaul_streams\naxis = 1, 2, 4\n");
    CHECK(b.axis == std::vector<double>{1.0, 2.0, 4.0});
    CHECK(b.schemes.size() == 3);
    CHECK(b.include_baseline);
  }

  TEST_CASE("overrides apply to the base configuration") {
    const SweepSpec s = parse_sweep_spec("kind = si_cancellation\naxis = 100\nk_an = 1\n");
    CHECK(point_params(s, 100.0).k_an == 1);
    CHECK(point_params(s, 100.0).alpha == doctest::Approx(1e-10));
  }

  TEST_CASE("malformed specifications are rejected") {
    const char* bad[] = {
        "axis = 1:2:1\n",                                   // no kind
        "kind = si_cancellation\n",                         // no axis
        "kind = nope\naxis = 1\n",                          // bad kind
        "kind = si_cancellation\naxis = 70, 60\n",          // decreasing
        "kind = si_cancellation\naxis = 60, 60\n",          // repeated
        "kind = si_cancellation\naxis = 60:50:1\n",         // empty range
        "kind = si_cancellation\naxis = 60:70:0\n",         // zero step
        "kind = si_cancellation\naxis = 60\nfoo = 1\n",     // unknown key
        "kind = si_cancellation\naxis = 60\nschemes = fd, xx\n",
        "kind = si_cancellation\naxis = 60\nschemes = fd, fd\n",
        "kind = si_cancellation\naxis = 60\nn_starts = 0\n",
        "kind = si_cancellation\naxis = 60\ninclude_baseline = maybe\n",
        "kind = intra_cell_pairs\naxis = 0:3:1\n",          // no routing
        "kind = intra_cell_pairs\naxis = 0:11:1\nrouting = d2d\n",  // K > min(D, U)
        "kind = intra_cell_pairs\naxis = 0, 1.5\nrouting = d2d\n",
        "kind = backhaul_streams\naxis = -1, 2\n",
        "kind = custom_grid\naxis = 1\nparameter = bogus\n",
        "kind = si_cancellation\naxis = 60\nbase_config = /nonexistent/file.cfg\n",
    };
    for (const char* text : bad) {
      CHECK_THROWS_AS_MESSAGE(parse_sweep_spec(text), ConfigError, text);
    }
  }

  TEST_CASE("backhaul axis sets both stream counts") {
    const SweepSpec s = parse_sweep_spec("kind = backhaul_streams\naxis = 1:12:1\n");
    for (double x : s.axis) {
      const SystemParams p = point_params(s, x);
      CHECK(p.m_bh_t == static_cast<int>(x));
      CHECK(p.m_bh_r == 2 * static_cast<int>(x));
    }
  }

  TEST_CASE("intra-cell routing selects the pair type") {
    const SweepSpec d = parse_sweep_spec("kind = intra_cell_pairs\naxis = 0:4:1\nrouting = d2d\n");
    CHECK(point_params(d, 3.0).k_d2d == 3);
    CHECK(point_params(d, 3.0).k_an == 0);
    const SweepSpec a =
        parse_sweep_spec("kind = intra_cell_pairs\naxis = 0:4:1\nrouting = via_an\n");
    CHECK(point_params(a, 3.0).k_an == 3);
    CHECK(point_params(a, 3.0).k_d2d == 0);
  }

  TEST_CASE("custom grid overrides the named key") {
    const SweepSpec s =
        parse_sweep_spec("kind = custom_grid\naxis = 20, 25\nparameter = p_ue_dbm\n");
    CHECK(point_params(s, 20.0).p_ue_max == doctest::Approx(100.0));
  }

  TEST_CASE("base_config is resolved relative to the spec directory") {
    const auto dir = std::filesystem::temp_directory_path() / "selfbh_sweep_test";
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "base.cfg") << "# tiny\n"
                                       "n_t = 200\nn_r = 100\nm_bh_t = 6\nm_bh_r = 12\n"
                                       "d = 10\nu = 10\nk_d2d = 0\nk_an = 0\n"
                                       "noise_dbm = -90\nl_ue_db = 80\nl_ud_db = 70\n"
                                       "l_bh_db = 80\np_an_dbm = 30\np_ue_dbm = 20\n"
                                       "p_bh_dbm = 40\nsi_cancellation_db = 120\n"
                                       "rho_min = 0.15\nrho_max = 0.3\n";
    std::ofstream(dir / "spec.cfg") << "kind = si_cancellation\naxis = 100\n"
                                       "base_config = base.cfg\n";
    const SweepSpec s = load_sweep_spec((dir / "spec.cfg").string());
    CHECK(point_params(s, 100.0).p_ue_max == doctest::Approx(100.0));
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("CSV layout for a single point") {
    const SweepSpec s = small_spec("hd");
    const std::string csv = format_csv(run_sweep(s));
    const auto lines = lines_of(csv);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == kCsvHeader);
    const auto base = fields_of(lines[1]);
    const auto opt = fields_of(lines[2]);
    REQUIRE(base.size() == 17);
    REQUIRE(opt.size() == 17);
    CHECK(base[0] == "120");
    CHECK(base[1] == "hd");
    CHECK(base[2] == "false");
    CHECK(opt[2] == "true");
    CHECK(base[15] == "0.5");
    CHECK(base[16] == "0");
  }

  TEST_CASE("FD rows report eta 0.5 and rates match a re-evaluation") {
    const SweepSpec s = small_spec("fd");
    const SystemParams p = point_params(s, 120.0);
    for (const SweepRow& row : run_sweep(s)) {
      REQUIRE(row.status == RowStatus::Ok);
      CHECK(row.rates.alloc.eta == 0.5);
      const RateBreakdown again = rates(Scheme::FullDuplex, p, row.rates.alloc);
      if (row.optimized) {
        CHECK(again.c_s == doctest::Approx(row.rates.c_s).epsilon(1e-12));
      } else {
        // The baseline reports delivered rates, clamped below the raw ones.
        CHECK(row.clamped);
        CHECK(row.rates.c_s < again.c_s);
      }
    }
  }

  TEST_CASE("rows are sorted and reruns are byte-identical") {
    SweepSpec s = small_spec("rl, fd");
    s.axis = {90.0, 110.0};
    const std::string a = format_csv(run_sweep(s, Execution::Serial));
    const std::string b = format_csv(run_sweep(s, Execution::Parallel));
    CHECK(a == b);
    const auto lines = lines_of(a);
    REQUIRE(lines.size() == 9);
    CHECK(lines[1].rfind("90,fd,false", 0) == 0);
    CHECK(lines[2].rfind("90,fd,true", 0) == 0);
    CHECK(lines[3].rfind("90,rl,false", 0) == 0);
    CHECK(lines[8].rfind("110,rl,true", 0) == 0);
  }

  TEST_CASE("invalid grid points become skip rows") {
    // FD needs N_t > D + M_t + N_r; 200 > 10 + 95 + 100 fails for M_t = 95.
    const SweepSpec s = parse_sweep_spec(
        "kind = custom_grid\nparameter = m_bh_t\naxis = 6, 95\nschemes = fd\nn_starts = 2\n");
    const auto lines = lines_of(format_csv(run_sweep(s)));
    REQUIRE(lines.size() == 5);
    CHECK(lines[3] == "95,fd,false,false,nan,nan,nan,nan,nan,nan,nan,nan,nan,nan,nan,nan,skip");
    CHECK(lines[4].substr(lines[4].size() - 5) == ",skip");
  }

  TEST_CASE("infeasible rows are marked") {
    SweepRow row;
    row.axis = 1.0;
    row.status = RowStatus::Infeasible;
    const auto lines = lines_of(format_csv({row}));
    CHECK(lines[1] == "1,fd,true,false,nan,nan,nan,nan,nan,nan,nan,nan,nan,nan,nan,nan,infeasible");
  }

  TEST_CASE("emit_csv error handling") {
    CHECK_THROWS_AS(emit_csv({}, "/tmp/never.csv"), std::invalid_argument);
    CHECK_THROWS_AS(emit_csv({SweepRow{}}, "/nonexistent-dir/out.csv"), std::runtime_error);
    const auto path = std::filesystem::temp_directory_path() / "selfbh_emit.csv";
    emit_csv({SweepRow{}}, path.string());
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == kCsvHeader);
    std::filesystem::remove(path);
  }
}
