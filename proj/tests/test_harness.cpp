#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <httplib.h>

#include "simct/collection_harness.hpp"
#include "simct/sim_server.hpp"

using namespace simct;
using namespace simct::harness;

namespace {

std::filesystem::path temp_dir() {
  const auto d = std::filesystem::temp_directory_path() /
                 ("simct-harness-" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
  std::filesystem::create_directories(d);
  return d;
}

std::size_t line_count(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) n += !line.empty();
  return n;
}

ModelEndpoint sim_endpoint(const std::string& id, double temperature = 0.7) {
  ModelEndpoint e;
  e.model_id = id;
  e.base_url = "sim://";
  e.temperature = temperature;
  return e;
}

sim::SyntheticModelSpec spec(std::uint64_t family) {
  sim::SyntheticModelSpec s;
  s.family_seed = family;
  return s;
}

RetryPolicy fast_retry(int limit = 1) { return {limit, std::chrono::milliseconds(1)}; }

// Generator that replays canned replies and records every prompt.
class ScriptedGenerator final : public Generator {
 public:
  explicit ScriptedGenerator(std::vector<std::string> replies) : replies_(std::move(replies)) {}
  std::string generate(const ModelEndpoint&, const std::string& prompt, const Query&, int) override {
    std::lock_guard lock(mu_);
    prompts.push_back(prompt);
    if (next_ >= replies_.size()) throw GenerationError("script exhausted");
    return replies_[next_++];
  }
  std::vector<std::string> prompts;

 private:
  std::mutex mu_;
  std::vector<std::string> replies_;
  std::size_t next_ = 0;
};

}  // namespace

TEST(CollectTriplets, ThreeQueriesPersistNineResponses) {
  SimulatedGenerator gen;
  gen.add("a", spec(1));
  gen.add("b", spec(2));
  CollectionPlan plan;
  plan.queries = sim::synth_queries(3, 5);
  plan.endpoint_a = sim_endpoint("a");
  plan.endpoint_b = sim_endpoint("b");
  const auto path = temp_dir() / "nine.jsonl";
  jsonl::AppendWriter w(path);
  const auto res = collect_triplets(plan, gen, &w);
  EXPECT_EQ(res.triplets.size(), 3u);
  EXPECT_TRUE(res.gaps.empty());
  EXPECT_EQ(line_count(path), 9u);
  const auto back = jsonl::read<Response>(path);
  const auto rebuilt = triplets_from_responses(plan.queries, back, "a", "b");
  ASSERT_EQ(rebuilt.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(rebuilt[i].r_a.text, res.triplets[i].r_a.text);
    EXPECT_EQ(rebuilt[i].r_b.text, res.triplets[i].r_b.text);
    // both A samples carry identical request parameters
    EXPECT_EQ(res.triplets[i].r_a.params, res.triplets[i].r_a_bar.params);
    EXPECT_EQ(res.triplets[i].r_a.sample_index, 0);
    EXPECT_EQ(res.triplets[i].r_a_bar.sample_index, 1);
  }
  EXPECT_EQ(infer_models(back), std::make_pair(std::string("a"), std::string("b")));
}

TEST(CollectTriplets, OneFailingQueryBecomesAGap) {
  SimulatedGenerator gen;
  gen.add("a", spec(1));
  const auto queries = sim::synth_queries(3, 5);
  gen.add("b", spec(2), {queries[1].id});
  CollectionPlan plan;
  plan.queries = queries;
  plan.endpoint_a = sim_endpoint("a");
  plan.endpoint_b = sim_endpoint("b");
  plan.retry = fast_retry(2);
  const auto gap_path = temp_dir() / "gaps.jsonl";
  jsonl::AppendWriter gaps(gap_path);
  const auto res = collect_triplets(plan, gen, nullptr, &gaps);
  EXPECT_EQ(res.triplets.size(), 2u);
  ASSERT_EQ(res.gaps.size(), 1u);
  EXPECT_EQ(res.gaps[0].query_id, queries[1].id);
  EXPECT_EQ(res.gaps[0].model_id, "b");
  EXPECT_EQ(line_count(gap_path), 1u);
}

TEST(CollectTriplets, MajorityOfGapsIsARunError) {
  SimulatedGenerator gen;
  const auto queries = sim::synth_queries(3, 5);
  gen.add("a", spec(1), {queries[0].id, queries[2].id});
  gen.add("b", spec(2));
  CollectionPlan plan;
  plan.queries = queries;
  plan.endpoint_a = sim_endpoint("a");
  plan.endpoint_b = sim_endpoint("b");
  plan.retry = fast_retry(0);
  EXPECT_THROW(collect_triplets(plan, gen), RunError);
}

TEST(CollectTriplets, PlanValidation) {
  SimulatedGenerator gen;
  gen.add("a", spec(1));
  CollectionPlan plan;
  plan.endpoint_a = sim_endpoint("a");
  plan.endpoint_b = sim_endpoint("a");
  EXPECT_THROW(collect_triplets(plan, gen), InvalidArgument);  // no queries
  plan.queries = sim::synth_queries(2, 1);
  EXPECT_THROW(collect_triplets(plan, gen), InvalidArgument);  // same model id
  plan.endpoint_b = sim_endpoint("b", -1.0);
  EXPECT_THROW(collect_triplets(plan, gen), InvalidArgument);
  plan.endpoint_b = sim_endpoint("b");
  plan.queries.push_back(plan.queries[0]);
  EXPECT_THROW(collect_triplets(plan, gen), InvalidArgument);  // duplicate id
  EXPECT_EQ(CollectionPlan::samples_from_a, 2);
  EXPECT_EQ(CollectionPlan::samples_from_b, 1);
}

TEST(CollectTriplets, FullSizedPlanShape) {
  SimulatedGenerator gen;
  gen.add("a", spec(1));
  gen.add("b", spec(1));
  CollectionPlan plan;
  plan.queries = sim::synth_queries(138, 3, 0.5, 0.3);
  plan.endpoint_a = sim_endpoint("a");
  plan.endpoint_b = sim_endpoint("b");
  plan.request_parallelism = 8;
  const auto path = temp_dir() / "full-shape.jsonl";
  jsonl::AppendWriter w(path);
  const auto res = collect_triplets(plan, gen, &w);
  EXPECT_EQ(res.triplets.size(), 138u);
  EXPECT_EQ(line_count(path), 414u);
  for (std::size_t i = 0; i < res.triplets.size(); ++i) EXPECT_EQ(res.triplets[i].query.id, plan.queries[i].id);
}

TEST(TripletsFromResponses, MissingAndDuplicates) {
  const auto queries = sim::synth_queries(2, 1);
  std::vector<Response> rs;
  for (int s = 0; s < 2; ++s) rs.push_back({queries[0].id, "a", s, "x", nlohmann::json::object(), ""});
  rs.push_back({queries[0].id, "b", 0, "y", nlohmann::json::object(), ""});
  rs.push_back({queries[1].id, "a", 0, "z", nlohmann::json::object(), ""});
  std::vector<std::string> missing;
  const auto t = triplets_from_responses(queries, rs, "a", "b", &missing);
  EXPECT_EQ(t.size(), 1u);
  EXPECT_EQ(missing, std::vector<std::string>{queries[1].id});
  rs.push_back(rs[0]);
  EXPECT_THROW(triplets_from_responses(queries, rs, "a", "b"), InvalidData);
}

TEST(ChatClient, RequestShapeAndAuth) {
  ::setenv("SIMCT_TEST_TOKEN", "tok-123", 1);
  nlohmann::json seen;
  std::string auth;
  httplib::Server srv;
  srv.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    seen = nlohmann::json::parse(req.body);
    auth = req.get_header_value("Authorization");
    res.set_content(R"({"choices":[{"message":{"role":"assistant","content":"hi there"}}]})", "application/json");
  });
  const int port = srv.bind_to_any_port("127.0.0.1");
  std::thread t([&] { srv.listen_after_bind(); });
  srv.wait_until_ready();
  ModelEndpoint e;
  e.model_id = "m1";
  e.base_url = "http://127.0.0.1:" + std::to_string(port) + "/v1/";
  e.temperature = 0.2;
  e.max_tokens = 64;
  e.extra_params = {{"top_p", 0.9}};
  e.auth_env_var = "SIMCT_TEST_TOKEN";
  ChatCompletionClient client;
  const Query q{"q", "What is up?", QueryType::open_end};
  EXPECT_EQ(client.generate(e, q.text, q, 0), "hi there");
  srv.stop();
  t.join();
  EXPECT_EQ(auth, "Bearer tok-123");
  EXPECT_EQ(seen.at("model"), "m1");
  EXPECT_EQ(seen.at("messages").at(0).at("role"), "user");
  EXPECT_EQ(seen.at("messages").at(0).at("content"), "What is up?");
  EXPECT_EQ(seen.at("temperature"), 0.2);
  EXPECT_EQ(seen.at("max_tokens"), 64);
  EXPECT_EQ(seen.at("top_p"), 0.9);
  ::unsetenv("SIMCT_TEST_TOKEN");
}

TEST(ChatClient, UnreachableEndpointNamesIt) {
  ModelEndpoint e;
  e.model_id = "ghost";
  e.base_url = "http://127.0.0.1:1/v1";
  e.timeout_s = 2;
  ChatCompletionClient client;
  const Query q{"q", "hello", QueryType::open_end};
  try {
    client.generate(e, q.text, q, 0);
    FAIL() << "expected GenerationError";
  } catch (const GenerationError& err) {
    EXPECT_NE(std::string(err.what()).find("ghost"), std::string::npos);
  }
}

TEST(Loopback, CollectOverHttpFromSimServers) {
  const auto queries = sim::synth_queries(12, 21, 0.5, 0.25);
  sim::ServerOptions oa, ob;
  oa.stream_id = 1;
  ob.stream_id = 2;
  ob.required_token = "letmein";
  ob.failing_queries = {queries[4].id};
  sim::SimServer sa(spec(3), queries, oa), sb(spec(3), queries, ob);
  sa.start();
  sb.start();
  ::setenv("SIMCT_LOOPBACK_TOKEN", "letmein", 1);
  CollectionPlan plan;
  plan.queries = queries;
  plan.endpoint_a.model_id = "sim-a";
  plan.endpoint_a.base_url = sa.base_url();
  plan.endpoint_b.model_id = "sim-b";
  plan.endpoint_b.base_url = sb.base_url();
  plan.endpoint_b.auth_env_var = "SIMCT_LOOPBACK_TOKEN";
  plan.retry = fast_retry(1);
  ChatCompletionClient client;
  const auto res = collect_triplets(plan, client);
  EXPECT_EQ(res.triplets.size(), 11u);
  ASSERT_EQ(res.gaps.size(), 1u);
  EXPECT_EQ(res.gaps[0].query_id, queries[4].id);
  // the server's n-th answer to a query is draw n of its stream
  for (const auto& t : res.triplets) {
    auto draw = [&](std::uint64_t stream, std::uint64_t n) {
      return sim::synth_text(spec(3), t.query,
                             mix({stream, fnv1a64(t.query.id), n, std::bit_cast<std::uint64_t>(0.7)}));
    };
    EXPECT_EQ(t.r_a.text, draw(1, 0));
    EXPECT_EQ(t.r_a_bar.text, draw(1, 1));
    EXPECT_EQ(t.r_b.text, draw(2, 0));
    EXPECT_EQ(t.r_a.params.at("temperature"), 0.7);
  }
  EXPECT_EQ(sa.requests_served(), 24u);
  sa.stop();
  sb.stop();

  // a wrong token is rejected
  sim::SimServer guarded(spec(3), queries, ob);
  guarded.start();
  ::setenv("SIMCT_LOOPBACK_TOKEN", "wrong", 1);
  EXPECT_THROW(client.generate(plan.endpoint_b, queries[0].text, queries[0], 0), GenerationError);
  ::unsetenv("SIMCT_LOOPBACK_TOKEN");
}

TEST(Loopback, ServerHonoursRequestTemperature) {
  const auto queries = sim::synth_queries(6, 2);
  sim::SimServer s(spec(4), queries);
  s.start();
  ModelEndpoint e;
  e.model_id = "m";
  e.base_url = s.base_url();
  e.temperature = 0.0;
  ChatCompletionClient client;
  // zero temperature: every draw repeats
  for (const auto& q : queries) EXPECT_EQ(client.generate(e, q.text, q, 0), client.generate(e, q.text, q, 1));
}

TEST(CraftPairs, RecipesLabelPairs) {
  SimulatedGenerator gen;
  gen.add("a", spec(1));
  gen.add("b", spec(2));
  const auto queries = sim::synth_queries(10, 8);
  const auto same = craft_pairs(queries, {sim_endpoint("a")}, Recipe::same_model_twice, gen);
  ASSERT_EQ(same.pairs.size(), 10u);
  for (const auto& p : same.pairs) {
    EXPECT_EQ(p.label, 1);
    EXPECT_EQ(p.provenance, Provenance::same_model_twice);
    EXPECT_EQ(p.resp_x.model_id, p.resp_y.model_id);
    EXPECT_NE(p.resp_x.sample_index, p.resp_y.sample_index);
  }
  const auto diff = craft_pairs(queries, {sim_endpoint("a"), sim_endpoint("b")}, Recipe::different_models, gen);
  ASSERT_EQ(diff.pairs.size(), 10u);
  for (const auto& p : diff.pairs) {
    EXPECT_EQ(p.label, 0);
    EXPECT_EQ(p.provenance, Provenance::different_models);
  }
  CraftOptions opt;
  opt.second_temperature = 0.5;
  const auto shift = craft_pairs(queries, {sim_endpoint("a", 0.2)}, Recipe::temperature_shift, gen, opt);
  ASSERT_EQ(shift.pairs.size(), 10u);
  for (const auto& p : shift.pairs) {
    EXPECT_EQ(p.label, 0);
    EXPECT_EQ(p.provenance, Provenance::temperature_shift);
    EXPECT_EQ(p.resp_x.params.at("temperature"), 0.2);
    EXPECT_EQ(p.resp_y.params.at("temperature"), 0.5);
    EXPECT_NE(p.resp_x.model_id, p.resp_y.model_id);
  }
}

TEST(CraftPairs, RecipePreconditions) {
  SimulatedGenerator gen;
  gen.add("a", spec(1));
  const auto queries = sim::synth_queries(2, 8);
  EXPECT_THROW(craft_pairs(queries, {}, Recipe::same_model_twice, gen), InvalidArgument);
  EXPECT_THROW(craft_pairs(queries, {sim_endpoint("a")}, Recipe::different_models, gen), InvalidArgument);
  EXPECT_THROW(craft_pairs(queries, {sim_endpoint("a")}, Recipe::temperature_shift, gen), InvalidArgument);
  EXPECT_THROW(recipe_from_string("mystery"), InvalidArgument);
}

TEST(PairsFile, LabelMustMatchProvenance) {
  SimulatedGenerator gen;
  gen.add("a", spec(1));
  const auto pairs = craft_pairs(sim::synth_queries(2, 8), {sim_endpoint("a")}, Recipe::same_model_twice, gen).pairs;
  nlohmann::json j = pairs[0];
  EXPECT_EQ(j.get<LabeledPair>().label, 1);
  j["label"] = 0;
  EXPECT_THROW(j.get<LabeledPair>(), InvalidData);
}

TEST(Judge, ParsesScore) {
  EXPECT_EQ(parse_judge_score("0.873, reason: similar wording"), 0.873);
  EXPECT_EQ(parse_judge_score("Score: 0.12345 because"), 0.123);
  EXPECT_FALSE(parse_judge_score("1"));
  EXPECT_FALSE(parse_judge_score("0"));
  EXPECT_FALSE(parse_judge_score("no number at all"));
}

TEST(Judge, SendsPromptVerbatimWithBothTexts) {
  ScriptedGenerator gen({"0.873, reason: ..."});
  const auto judge = sim_endpoint("judge");
  EXPECT_EQ(llm_judge_score(judge, gen, "first text", "second text"), 0.873);
  ASSERT_EQ(gen.prompts.size(), 1u);
  const auto& p = gen.prompts[0];
  EXPECT_EQ(p.rfind("Now, here are two paragraphs for you.", 0), 0u);
  EXPECT_NE(p.find("The score cannot be equal to \"0\" or \"1\"!"), std::string::npos);
  EXPECT_NE(p.find("first text"), std::string::npos);
  EXPECT_NE(p.find("second text"), std::string::npos);
}

TEST(Judge, ExactOneIsRejectedAfterReprompt) {
  ScriptedGenerator gen({"1", "1"});
  EXPECT_THROW(llm_judge_score(sim_endpoint("judge"), gen, "a", "b", fast_retry(0)), JudgeError);
  EXPECT_EQ(gen.prompts.size(), 2u);
}

TEST(Judge, RepromptRecoversAndProseFails) {
  ScriptedGenerator ok({"I cannot say", "0.4"});
  EXPECT_EQ(llm_judge_score(sim_endpoint("judge"), ok, "a", "b", fast_retry(0)), 0.4);
  ScriptedGenerator prose({"they look alike", "really alike"});
  EXPECT_THROW(llm_judge_score(sim_endpoint("judge"), prose, "a", "b", fast_retry(0)), JudgeError);
}

TEST(Judge, OverHttp) {
  httplib::Server srv;
  srv.Post("/v1/chat/completions", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"choices":[{"message":{"content":"0.615 - same narrative logic"}}]})", "application/json");
  });
  const int port = srv.bind_to_any_port("127.0.0.1");
  std::thread t([&] { srv.listen_after_bind(); });
  srv.wait_until_ready();
  ModelEndpoint judge;
  judge.model_id = "judge";
  judge.base_url = "http://127.0.0.1:" + std::to_string(port) + "/v1";
  ChatCompletionClient client;
  EXPECT_EQ(llm_judge_score(judge, client, "x", "y"), 0.615);
  srv.stop();
  t.join();
}
