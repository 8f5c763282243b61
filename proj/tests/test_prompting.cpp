#include "vml/prompting.hpp"

#include "catch2/catch_amalgamated.hpp"
#include "helpers.hpp"
#include "vml/numfmt.hpp"

using namespace vml;

namespace {

const char* kFamilies[] = {"linear",      "polynomial",
                           "sinusoid",    "two_blobs",
                           "two_circles", "two_circles_prior",
                           "text_classification"};

}  // namespace

TEST_CASE("fixture sets load with every placeholder present exactly once") {
  for (const char* fam : kFamilies) {
    auto fx = load_task_fixture(testhelp::fixtures() / "templates" / fam);
    CHECK(!fx.theta0.empty());
    for (const char* key : {"{theta}", "{input}", "{format_rules}"})
      CHECK(fx.prompts.learner_template.find(key) != std::string::npos);
    for (const char* key : {"{inputs}", "{theta}", "{predictions}",
                            "{targets}", "{loss_line}", "{format_rules}"})
      CHECK(fx.prompts.optimizer_template.find(key) != std::string::npos);
  }
}

TEST_CASE("learner prompts reproduce every recorded forward prompt") {
  for (const char* fam : kFamilies) {
    auto fx = load_task_fixture(testhelp::fixtures() / "templates" / fam);
    auto steps = testhelp::transcript(fam);
    for (const auto& step : steps) {
      auto inputs = testhelp::inputs_of(step);
      auto msgs = render_learner_prompt(
          fx.prompts, fx.task, step.at("theta_current_full"), inputs[0]);
      REQUIRE(msgs.size() == 1);
      CHECK(msgs[0].role == Role::user);
      INFO("family " << fam << " epoch " << step.at("epoch") << " step "
                     << step.at("step_in_epoch"));
      CHECK(msgs[0].content == step.at("forward_prompt").get<std::string>());
    }
  }
}

TEST_CASE("optimizer prompts reproduce every recorded optimizer prompt") {
  OptimizerConfig cfg;  // loss hidden, as in the recordings
  for (const char* fam : kFamilies) {
    auto fx = load_task_fixture(testhelp::fixtures() / "templates" / fam);
    auto steps = testhelp::transcript(fam);
    for (const auto& step : steps) {
      auto inputs = testhelp::inputs_of(step);
      auto preds = testhelp::predictions_of(step, fx.task.family);
      auto targets = testhelp::values_of(step.at("targets"), fx.task.family);
      auto msgs = render_optimizer_prompt(
          fx.prompts, fx.task, step.at("theta_current_full"), inputs, preds,
          targets, cfg, {}, std::nullopt);
      REQUIRE(msgs.size() == 1);
      INFO("family " << fam << " epoch " << step.at("epoch") << " step "
                     << step.at("step_in_epoch"));
      CHECK(msgs[0].content == step.at("optimizer_prompt").get<std::string>());
    }
  }
}

TEST_CASE("prior text heads the rendered parameter section") {
  auto fx = load_task_fixture(testhelp::fixtures() / "templates" /
                              "two_circles_prior");
  CHECK(!fx.prior.empty());
  auto params = make_model_params(fx.prior, fx.theta0);
  auto msgs = render_learner_prompt(fx.prompts, fx.task,
                                    full_theta_text(params),
                                    std::vector<double>{0.1, 0.2});
  CHECK(msgs[0].content.find(fx.prior + " " + fx.theta0) != std::string::npos);
}

TEST_CASE("text inputs are inserted verbatim, unbracketed") {
  auto fx = load_task_fixture(testhelp::fixtures() / "templates" /
                              "text_classification");
  auto msgs = render_learner_prompt(fx.prompts, fx.task, fx.theta0,
                                    std::string("fatherhood"));
  CHECK(msgs[0].content.find("\n\nfatherhood\n\n") != std::string::npos);
  CHECK(msgs[0].content.find("[fatherhood]") == std::string::npos);
}

TEST_CASE("input kind mismatches are rejected") {
  auto fx = load_task_fixture(testhelp::fixtures() / "templates" / "linear");
  CHECK_THROWS_AS(render_learner_prompt(fx.prompts, fx.task, fx.theta0,
                                        std::string("oops")),
                  Error);
}

TEST_CASE("history exchanges prepend as alternating user/assistant turns") {
  auto fx = load_task_fixture(testhelp::fixtures() / "templates" / "linear");
  std::vector<Input> inputs{std::vector<double>{1.0}};
  std::vector<Prediction> preds{{Value{7.0}, "Output: [7.]", true}};
  std::vector<Value> targets{Value{7.5}};
  std::vector<Exchange> history{{"p1", "r1"}, {"p2", "r2"}, {"p3", "r3"}};

  OptimizerConfig cfg;
  for (int window : {0, 1, 2, 3, 5}) {
    cfg.history_window = window;
    auto msgs = render_optimizer_prompt(fx.prompts, fx.task, fx.theta0,
                                        inputs, preds, targets, cfg, history,
                                        std::nullopt);
    size_t kept = std::min<size_t>(window, history.size());
    REQUIRE(msgs.size() == 1 + 2 * kept);
    for (size_t i = 0; i < kept; ++i) {
      CHECK(msgs[2 * i].role == Role::user);
      CHECK(msgs[2 * i + 1].role == Role::assistant);
    }
    if (window == 1) {
      CHECK(msgs[0].content == "p3");  // most recent exchange
      CHECK(msgs[1].content == "r3");
    }
  }
}

TEST_CASE("loss line appears exactly once, and only when enabled") {
  auto fx = load_task_fixture(testhelp::fixtures() / "templates" / "linear");
  auto steps = testhelp::transcript("linear");
  const auto& step = steps[0];
  auto inputs = testhelp::inputs_of(step);
  auto preds = testhelp::predictions_of(step, TaskFamily::regression_1d);
  auto targets = testhelp::values_of(step.at("targets"),
                                     TaskFamily::regression_1d);
  double loss = step.at("loss");
  std::string needle = "** Overall Loss: ** " + format_shortest(loss);

  OptimizerConfig cfg;
  cfg.include_loss_value = false;
  auto hidden = render_optimizer_prompt(fx.prompts, fx.task,
                                        step.at("theta_current_full"), inputs,
                                        preds, targets, cfg, {}, loss);
  CHECK(hidden[0].content.find(needle) == std::string::npos);
  CHECK(hidden[0].content == step.at("optimizer_prompt").get<std::string>());

  cfg.include_loss_value = true;
  auto shown = render_optimizer_prompt(fx.prompts, fx.task,
                                       step.at("theta_current_full"), inputs,
                                       preds, targets, cfg, {}, loss);
  auto first = shown[0].content.find(needle);
  REQUIRE(first != std::string::npos);
  CHECK(shown[0].content.find(needle, first + 1) == std::string::npos);
}

TEST_CASE("rendering is deterministic") {
  auto fx = load_task_fixture(testhelp::fixtures() / "templates" / "linear");
  auto a = render_learner_prompt(fx.prompts, fx.task, fx.theta0,
                                 std::vector<double>{1.26});
  auto b = render_learner_prompt(fx.prompts, fx.task, fx.theta0,
                                 std::vector<double>{1.26});
  CHECK(a[0].content == b[0].content);
}

TEST_CASE("size mismatches are rejected") {
  auto fx = load_task_fixture(testhelp::fixtures() / "templates" / "linear");
  std::vector<Input> inputs{std::vector<double>{1.0}};
  std::vector<Prediction> preds;
  std::vector<Value> targets{Value{7.5}};
  CHECK_THROWS_AS(render_optimizer_prompt(fx.prompts, fx.task, fx.theta0,
                                          inputs, preds, targets, {}, {},
                                          std::nullopt),
                  Error);
}
