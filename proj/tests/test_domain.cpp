#include "vml/domain.hpp"

#include "catch2/catch_amalgamated.hpp"

using namespace vml;

TEST_CASE("make_model_params stores both texts unchanged") {
  auto p = make_model_params("The decision boundary is a circle.",
                             "You are designed to do binary classification.");
  CHECK(p.prior_text == "The decision boundary is a circle.");
  CHECK(p.learned_text == "You are designed to do binary classification.");

  auto q = make_model_params("", "You are designed to do regression.");
  CHECK(q.prior_text.empty());
}

TEST_CASE("make_model_params rejects an empty parameter text") {
  CHECK_THROWS_MATCHES(make_model_params("", ""), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == ErrorCode::invalid_argument;
                       }));
}

TEST_CASE("full_theta_text joins prior and parameters with one space") {
  CHECK(full_theta_text({"", "y = 3.34x + 3.28"}) == "y = 3.34x + 3.28");
  CHECK(full_theta_text({"P.", "T."}) == "P. T.");
}

TEST_CASE("full_theta_text is length-additive") {
  ModelParams p{"abc", "defgh"};
  CHECK(full_theta_text(p).size() ==
        p.prior_text.size() + p.learned_text.size() + 1);
  ModelParams q{"", "defgh"};
  CHECK(full_theta_text(q).size() == q.learned_text.size());
}

TEST_CASE("enum round-trips") {
  for (auto f : {TaskFamily::regression_1d, TaskFamily::classification_2d_prob,
                 TaskFamily::classification_2d_label,
                 TaskFamily::classification_text})
    CHECK(family_from_string(to_string(f)) == f);
  for (auto s : {UpdateStrategy::replace, UpdateStrategy::append,
                 UpdateStrategy::append_summarized})
    CHECK(strategy_from_string(to_string(s)) == s);
  CHECK_THROWS_AS(family_from_string("bogus"), Error);
}

TEST_CASE("optimizer config defaults") {
  OptimizerConfig cfg;
  CHECK(cfg.history_window == 1);
  CHECK_FALSE(cfg.include_loss_value);
  CHECK(cfg.update_strategy == UpdateStrategy::replace);
  CHECK(cfg.temperature == 0.0);
}
