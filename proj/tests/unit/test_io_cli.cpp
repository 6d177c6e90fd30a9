#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gsq/cli.hpp"
#include "gsq/io.hpp"

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run gsq_run(std::vector<std::string> args) {
  args.insert(args.begin(), "gsq");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = gsq::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

gsq::io::Table parse_csv(const std::string& s) {
  std::istringstream is(s);
  return gsq::io::read_csv(is);
}

}  // namespace

TEST(Csv, RoundTripIsByteIdentical) {
  gsq::io::Table t;
  t.add_meta("k", "3");
  t.add_meta("c", 1.0 / 3.0);
  t.columns = {"p", "value"};
  t.add_row({0.1, std::nan("")});
  t.add_row({-2.5e-300, 1e308});
  t.add_row({1.0 / 7.0, -0.0});
  std::ostringstream a;
  gsq::io::write_csv(a, t);
  std::ostringstream b;
  gsq::io::write_csv(b, parse_csv(a.str()));
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(parse_csv(a.str()).numeric_column("p")[2], 1.0 / 7.0);
}

TEST(Csv, MalformedInput) {
  EXPECT_THROW(parse_csv(""), gsq::domain_error);
  EXPECT_THROW(parse_csv("a,b\n1\n"), gsq::domain_error);
  EXPECT_THROW(gsq::io::parse_real("1.5x"), gsq::domain_error);
}

TEST(Json, NanBecomesNull) {
  gsq::io::Table t;
  t.columns = {"x", "label"};
  t.rows.push_back({"nan", "convergent"});
  const auto j = gsq::io::to_json(t);
  EXPECT_TRUE(j["rows"][0][0].is_null());
  EXPECT_EQ(j["rows"][0][1], "convergent");
}

TEST(Cli, StateSupport) {
  const auto r = gsq_run({"state", "--k", "3", "--alpha", "0", "--m-max", "50"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto t = parse_csv(r.out);
  ASSERT_EQ(t.rows.size(), 51u);
  const auto n = t.numeric_column("n");
  for (std::size_t i = 0; i < n.size(); ++i) EXPECT_EQ(n[i], 6.0 * i);
  ASSERT_NE(t.find_meta("c"), nullptr);
  ASSERT_NE(t.find_meta("d"), nullptr);
  // re-emission of what the CLI wrote is byte-identical
  std::ostringstream again;
  gsq::io::write_csv(again, t);
  EXPECT_EQ(again.str(), r.out);
}

TEST(Cli, StateRejectsSmallK) {
  const auto r = gsq_run({"state", "--k", "2", "--alpha", "0"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("norm diverges for k<3"), std::string::npos);
  EXPECT_EQ(gsq_run({"state", "--k", "2", "--alpha", "0", "--m-max", "10", "--unnormalized"}).code, 0);
  EXPECT_EQ(gsq_run({"state", "--k", "3", "--alpha", "3"}).code, 2);
  EXPECT_EQ(gsq_run({"state", "--bogus"}).code, 2);
  EXPECT_EQ(gsq_run({}).code, 2);
}

TEST(Cli, StateJson) {
  const auto r = gsq_run({"state", "--k", "5", "--alpha", "4", "--m-max", "100", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["metadata"]["k"], "5");
  EXPECT_EQ(j["metadata"]["alpha"], "4");
  EXPECT_EQ(j["rows"].size(), 101u);
  EXPECT_EQ(j["rows"][1][0], 14.0);
}

TEST(Cli, StateToFile) {
  const auto path = std::filesystem::temp_directory_path() / "gsq_state_test.csv";
  ASSERT_EQ(gsq_run({"state", "--k", "4", "--alpha", "1", "--m-max", "5", "-o", path.string()}).code, 0);
  std::ifstream f(path);
  EXPECT_EQ(gsq::io::read_csv(f).rows.size(), 6u);
  std::filesystem::remove(path);
}

TEST(Cli, VerifyCoherent) {
  const auto r = gsq_run({"verify", "--k", "1", "--alpha", "0", "--tau", "0.8", "--dim", "256"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j["all_pass"].get<bool>());
}

TEST(Cli, VerifyK3Report) {
  const auto r = gsq_run({"verify", "--k", "3", "--alpha", "1", "--dim", "128", "--tau", "0.005"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  std::map<std::string, nlohmann::json> by_name;
  for (const auto& e : j["checks"]) by_name[e["name"].get<std::string>()] = e;
  EXPECT_TRUE(by_name.at("gk_phase")["pass"].get<bool>());
  EXPECT_EQ(by_name.at("gk_phase")["value"].get<double>(), 0.0);
  EXPECT_TRUE(by_name.at("interior_residual")["pass"].get<bool>());
  EXPECT_TRUE(by_name.at("round_trip")["pass"].get<bool>());
  EXPECT_TRUE(by_name.at("invariance_lower_half").contains("reliable"));
}

TEST(Cli, VerifyValidation) {
  EXPECT_EQ(gsq_run({"verify", "--k", "3", "--tau", "0.5"}).code, 2);
  EXPECT_EQ(gsq_run({"verify", "--k", "3", "--dim", "12"}).code, 2);
}

TEST(Cli, Moments) {
  const auto r = gsq_run({"moments", "--k-min", "3", "--k-max", "4", "--j-max", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto t = parse_csv(r.out);
  const auto qi = t.column("quantity"), si = t.column("state"), ci = t.column("classification");
  const auto ki = t.column("k"), ri = t.column("rule_divergent"), li = t.column("last_partial_sum");
  for (const auto& row : t.rows) {
    if (row[qi].rfind("n^", 0) == 0) { EXPECT_EQ(row[ci] != "convergent", row[ri] == "1") << row[ki] << row[qi]; }
    if (row[qi] == "x" && row[si] == "0") { EXPECT_EQ(gsq::io::parse_real(row[li]), 0.0); }
    if (row[qi] == "x" && row[si] == "0+1") { EXPECT_EQ(row[ci], row[ki] == "3" ? "log_divergent" : "convergent"); }
  }
}

TEST(Cli, MomentumGrid) {
  const auto r = gsq_run({"momentum", "--p-min", "-1", "--p-max", "1", "--p-steps", "41"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto t = parse_csv(r.out);
  ASSERT_EQ(t.rows.size(), 41u);
  const auto p = t.numeric_column("p");
  const auto phi2 = t.numeric_column("phi2");
  const auto phi3 = t.numeric_column("phi3");
  for (std::size_t i = 0; i < p.size(); ++i) {
    EXPECT_EQ(std::isnan(phi2[i]), std::abs(p[i]) < 0.05) << p[i];
    EXPECT_EQ(phi3[i], -phi3[p.size() - 1 - i]);
  }
}

TEST(Cli, MomentumValidation) {
  EXPECT_EQ(gsq_run({"momentum", "--p-min", "1", "--p-max", "0"}).code, 2);
  EXPECT_EQ(gsq_run({"momentum", "--m-terms", "10"}).code, 2);
}

TEST(Cli, Figures) {
  const auto dir = std::filesystem::temp_directory_path() / "gsq_fig_test";
  std::filesystem::remove_all(dir);
  const auto r = gsq_run({"figures", "--p-min", "-3", "--p-max", "3", "--p-steps", "61", "--m-terms", "20000",
                          "-o", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;

  std::ifstream f1(dir / "fig1.csv");
  const auto t1 = gsq::io::read_csv(f1);
  const char* cols[] = {"psi0", "psi1", "psi2"};
  for (int a = 0; a < 3; ++a) {
    const auto v = t1.numeric_column(cols[a]);
    double prev = HUGE_VAL;
    for (std::size_t n = 0; n < v.size(); ++n) {
      const bool on = n % 6 == static_cast<std::size_t>(a);
      EXPECT_EQ(std::isnan(v[n]), !on) << a << " " << n;
      if (on) {
        EXPECT_LT(v[n], prev);
        prev = v[n];
      }
    }
  }

  std::ifstream f2(dir / "fig2.csv");
  const auto t2 = gsq::io::read_csv(f2);
  EXPECT_EQ(t2.rows.size(), 61u);

  std::ifstream f3(dir / "fig3.csv");
  const auto t3 = gsq::io::read_csv(f3);
  ASSERT_NE(t3.find_meta("max_imag_part"), nullptr);
  EXPECT_EQ(gsq::io::parse_real(*t3.find_meta("max_imag_part")), 0.0);
  const auto odd = t3.numeric_column("minus_i_psi1");
  for (std::size_t i = 0; i < odd.size(); ++i) {
    if (std::isnan(odd[i])) continue;
    EXPECT_EQ(odd[i], -odd[odd.size() - 1 - i]);
  }
  std::filesystem::remove_all(dir);
}

TEST(Cli, Help) {
  const auto r = gsq_run({"state", "--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("--m-max"), std::string::npos);
}
