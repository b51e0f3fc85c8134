// Exercises the shared library through its C header only.

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include "axbq/axbq.h"

namespace fs = std::filesystem;

namespace {

struct Config {
  axbq_config* p = nullptr;
  ~Config() { axbq_config_free(p); }
};

struct State {
  axbq_state* p = nullptr;
  ~State() { axbq_state_free(p); }
};

std::string take(char* s) {
  std::string out = s ? s : "";
  axbq_string_free(s);
  return out;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("axbq_test_capi_" + name);
  fs::remove_all(p);
  return p;
}

void small(axbq_config* c, const fs::path& out) {
  ASSERT_EQ(axbq_config_set(c, "grid.nr", "32"), AXBQ_OK);
  ASSERT_EQ(axbq_config_set(c, "grid.nz", "64"), AXBQ_OK);
  ASSERT_EQ(axbq_config_set(c, "time.t_end", "0.1"), AXBQ_OK);
  ASSERT_EQ(axbq_config_set(c, "physics.kappa", "0.5"), AXBQ_OK);
  ASSERT_EQ(axbq_config_set(c, "output.directory", out.string().c_str()), AXBQ_OK);
}

}  // namespace

TEST(CApi, VersionAndStatusStrings) {
  EXPECT_STREQ(axbq_version(), "0.1.0");
  EXPECT_STREQ(axbq_status_string(AXBQ_OK), "ok");
  EXPECT_STREQ(axbq_status_string(AXBQ_BLOW_UP), "blow-up");
  EXPECT_GE(axbq_thread_count(), 1);
}

TEST(CApi, ConfigRoundTrip) {
  Config a;
  ASSERT_EQ(axbq_config_default(&a.p), AXBQ_OK);
  ASSERT_EQ(axbq_config_set(a.p, "physics.kappa", "0.25"), AXBQ_OK);
  char* text = nullptr;
  ASSERT_EQ(axbq_config_serialize(a.p, &text), AXBQ_OK);
  const std::string s = take(text);
  Config b;
  ASSERT_EQ(axbq_config_parse(s.c_str(), &b.p, nullptr, nullptr), AXBQ_OK);
  char* back = nullptr;
  ASSERT_EQ(axbq_config_serialize(b.p, &back), AXBQ_OK);
  EXPECT_EQ(take(back), s);
  char* kappa = nullptr;
  ASSERT_EQ(axbq_config_get(b.p, "physics.kappa", &kappa), AXBQ_OK);
  EXPECT_EQ(take(kappa), "0.25");
}

TEST(CApi, ParseErrorReportsPosition) {
  Config c;
  int line = 0, column = 0;
  EXPECT_EQ(axbq_config_parse("[grid]\n\nnr = twelve\n", &c.p, &line, &column), AXBQ_PARSE_ERROR);
  EXPECT_EQ(c.p, nullptr);
  EXPECT_EQ(line, 3);
  EXPECT_EQ(column, 6);
  EXPECT_NE(std::string(axbq_last_error()).find("grid.nr"), std::string::npos);
}

TEST(CApi, ValidationErrorLeavesConfigUnchanged) {
  Config c;
  ASSERT_EQ(axbq_config_default(&c.p), AXBQ_OK);
  EXPECT_EQ(axbq_config_set(c.p, "physics.kappa", "-1"), AXBQ_VALIDATION_ERROR);
  EXPECT_NE(std::string(axbq_last_error()).find("physics.kappa"), std::string::npos);
  char* v = nullptr;
  ASSERT_EQ(axbq_config_get(c.p, "physics.kappa", &v), AXBQ_OK);
  EXPECT_EQ(take(v), "none");
  EXPECT_EQ(axbq_config_set(c.p, "no.such", "1"), AXBQ_INVALID_ARGUMENT);
}

TEST(CApi, NullArgumentsAreRejected) {
  EXPECT_EQ(axbq_config_default(nullptr), AXBQ_INVALID_ARGUMENT);
  EXPECT_EQ(axbq_config_parse(nullptr, nullptr, nullptr, nullptr), AXBQ_INVALID_ARGUMENT);
  EXPECT_EQ(axbq_cmd_run(nullptr, nullptr, nullptr, nullptr), AXBQ_INVALID_ARGUMENT);
  EXPECT_EQ(axbq_state_time(nullptr, nullptr), AXBQ_INVALID_ARGUMENT);
  axbq_config_free(nullptr);
  axbq_state_free(nullptr);
  axbq_string_free(nullptr);
}

TEST(CApi, LastErrorIsThreadLocal) {
  Config c;
  ASSERT_EQ(axbq_config_default(&c.p), AXBQ_OK);
  EXPECT_EQ(axbq_config_set(c.p, "grid.nr", "x"), AXBQ_VALIDATION_ERROR);
  const std::string here = axbq_last_error();
  std::string there;
  std::thread([&] {
    axbq_config_set(c.p, "time.dt", "-1");
    there = axbq_last_error();
  }).join();
  EXPECT_EQ(std::string(axbq_last_error()), here);
  EXPECT_NE(there, here);
}

TEST(CApi, StateStepAndCheckpoint) {
  Config c;
  ASSERT_EQ(axbq_config_default(&c.p), AXBQ_OK);
  small(c.p, scratch("state"));
  State s;
  ASSERT_EQ(axbq_state_create(c.p, 0.5, &s.p), AXBQ_OK);
  int nr = 0, nz = 0;
  ASSERT_EQ(axbq_state_dims(s.p, &nr, &nz), AXBQ_OK);
  EXPECT_EQ(nr, 32);
  EXPECT_EQ(nz, 64);
  ASSERT_EQ(axbq_state_step(s.p, c.p, 3), AXBQ_OK);
  double t = 0.0;
  ASSERT_EQ(axbq_state_time(s.p, &t), AXBQ_OK);
  EXPECT_NEAR(t, 0.03, 1e-12);

  std::vector<double> rho(static_cast<std::size_t>(nr * nz));
  ASSERT_EQ(axbq_state_field(s.p, "rho", rho.data(), rho.size()), AXBQ_OK);
  EXPECT_GT(rho[0], 0.0);
  EXPECT_EQ(axbq_state_field(s.p, "rho", rho.data(), rho.size() - 1), AXBQ_INVALID_DIMENSION);
  EXPECT_EQ(axbq_state_field(s.p, "pressure", rho.data(), rho.size()), AXBQ_INVALID_ARGUMENT);

  const fs::path ck = scratch("state_ck");
  fs::create_directories(ck);
  ASSERT_EQ(axbq_state_save(s.p, (ck / "s.axbq").string().c_str()), AXBQ_OK);
  State back;
  ASSERT_EQ(axbq_state_load((ck / "s.axbq").string().c_str(), &back.p), AXBQ_OK);
  for (const char* name : {"rho", "zeta", "vr", "vz"}) {
    std::vector<double> a(rho.size()), b(rho.size());
    axbq_state_field(s.p, name, a.data(), a.size());
    axbq_state_field(back.p, name, b.data(), b.size());
    EXPECT_EQ(a, b) << name;
  }
  EXPECT_EQ(axbq_state_load((ck / "missing.axbq").string().c_str(), &back.p), AXBQ_IO_ERROR);
}

TEST(CApi, CommandsAndLogCallback) {
  Config c;
  ASSERT_EQ(axbq_config_default(&c.p), AXBQ_OK);
  const fs::path out = scratch("run");
  small(c.p, out);
  std::vector<std::string> lines;
  auto collect = [](const char* line, void* user) { static_cast<std::vector<std::string>*>(user)->push_back(line); };
  int exit_status = -1;
  ASSERT_EQ(axbq_cmd_run(c.p, collect, &lines, &exit_status), AXBQ_OK) << axbq_last_error();
  EXPECT_EQ(exit_status, AXBQ_EXIT_OK);
  ASSERT_EQ(lines.size(), 1u);
  EXPECT_EQ(lines[0].rfind("kappa_0.5: passed", 0), 0u) << lines[0];

  int files = 0;
  ASSERT_EQ(axbq_cmd_plotdata(out.string().c_str(), (out / "plots").string().c_str(), nullptr, nullptr, &files),
            AXBQ_OK);
  EXPECT_EQ(files, 2);
  EXPECT_EQ(axbq_cmd_plotdata((out / "nothing").string().c_str(), (out / "p2").string().c_str(), nullptr, nullptr,
                              &files),
            AXBQ_MISSING_RUN);
}

TEST(CApi, BlowUpIsAnError) {
  Config c;
  ASSERT_EQ(axbq_config_default(&c.p), AXBQ_OK);
  small(c.p, scratch("blowup"));
  axbq_config_set(c.p, "physics.kappa", "0");
  axbq_config_set(c.p, "time.dt", "5");
  axbq_config_set(c.p, "time.t_end", "100");
  axbq_config_set(c.p, "time.cfl_enforce", "false");
  int exit_status = 0;
  EXPECT_EQ(axbq_cmd_run(c.p, nullptr, nullptr, &exit_status), AXBQ_BLOW_UP);
  EXPECT_EQ(exit_status, AXBQ_EXIT_ERROR);
}

TEST(CApi, VerifyTooCoarse) {
  Config c;
  ASSERT_EQ(axbq_config_default(&c.p), AXBQ_OK);
  axbq_config_set(c.p, "grid.nr", "2");
  axbq_config_set(c.p, "output.directory", scratch("coarse").string().c_str());
  int exit_status = 0;
  EXPECT_EQ(axbq_cmd_verify(c.p, nullptr, nullptr, &exit_status), AXBQ_GRID_TOO_COARSE);
  EXPECT_EQ(exit_status, AXBQ_EXIT_ERROR);
}
