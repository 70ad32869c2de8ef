// Copyright 2026 The SimCT Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

// Deterministic synthetic text generators standing in for deployed models.
//
// Every query has a topic pool and a set of candidate short answers shared
// by all families. A family (family_seed) fixes how it mixes topic words
// with its own style words and which answer it prefers; vocab_shift moves a
// fraction of slots away from the family baseline; temperature_analog
// drives per-draw substitution, answer flips and formatting changes. Output
// depends only on (spec, query, draw_seed).

#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "simct/error.hpp"
#include "simct/hash.hpp"
#include "simct/records.hpp"
#include "simct/text_metrics.hpp"
#include "simct/utf8.hpp"

namespace simct::sim {

struct SyntheticModelSpec {
  std::uint64_t family_seed = 0;
  double temperature_analog = 0.7;
  double vocab_shift = 0.0;
  double closed_answer_flip_prob = 0.2;
  int verbosity = 40;

  bool operator==(const SyntheticModelSpec&) const = default;
};

enum class GroundTruth { consistent, inconsistent };

struct SimScenario {
  SyntheticModelSpec spec_a;
  SyntheticModelSpec spec_b;
  GroundTruth ground_truth = GroundTruth::consistent;
  // same_spec, different_family or temperature_shift
  std::string kind;
};

namespace detail {

inline const std::vector<std::string>& english_words() {
  static const std::vector<std::string> words = [] {
    constexpr std::string_view text =
    "time year people way day man thing woman life child world school state "
    "family student group country problem hand part place case week company "
    "system program question work government number night point home water "
    "room mother area money story fact month lot right study book eye job "
    "word business issue side kind head house service friend father power "
    "hour game line end member law car city community name president team "
    "minute idea kid body information back parent face others level office "
    "door health person art war history party result change morning reason "
    "research girl guy moment air teacher force education foot boy age "
    "policy music market sense nation plan college interest death experience "
    "effect use class control care field development role effort rate heart "
    "drug show leader light voice wife police mind price report decision son "
    "view relationship town road arm difference value building action model "
    "season society tax director position player record paper space ground "
    "form event official matter center couple site project activity star "
    "table need court oil situation cost industry figure street image phone "
    "data picture practice piece land product doctor wall patient worker "
    "news test movie north love support technology step baby computer type "
    "attention film tree source organization hair window evidence population "
    "truth song energy river coral ocean mountain island desert forest "
    "garden bridge castle village harbor valley planet comet signal engine "
    "metal stone glass silver copper iron salt sugar bread fruit apple grain "
    "rice wheat cotton silk wool paint color green blue red yellow purple "
    "orange bright dark quiet loud quick slow warm cold fresh ancient modern "
    "simple complex strong gentle rapid steady careful famous common rare "
    "useful";
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
      if (c == ' ') {
        if (!cur.empty()) out.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
  }();
  return words;
}

inline const std::vector<std::string>& cjk_chars() {
  static const std::vector<std::string> chars = [] {
    std::vector<std::string> out;
    for (char32_t c : utf8::decode("的一是在不了有和人这中大为上个国我以要他时来用们生到作地于出就分对成会可主发年动同工也能下过子说产种面而方后多定行学法所民得经十三之进着等部度家电力里如水化高自二理起小物现实加量都两体制机当使点从业本去把性好应开它合还因由其些然前外天政四日那社义事平形相全表间样与关各重新线内数正心反你明看原又么利比或但质气第向道命此变条只没结解问意建月公无系军很情者最立代想已通并提直题党程展五果料象员革位入常文总次品式活设及管特件长求老头基资边流路级少图山统接知较将组见计别她手角期根论运农指几九区强放决西被干做必战先回则任取据处队南给色光门即保治北造百规热领七海口东导器压志世金增争济阶油思术极交受联什认六共权收证改清己美再采转更单风切打白教速花带安场身车例真务具万每目至达走积示议声报斗完类八离华名确才科张信马节话米整空元况今集温传土许步群广石记需段研界拉林律叫且究观越织装影算低持音众书布复容儿须际商非验连断深难近矿千周委素技备半办青省列习响约支般史感劳便团往酸历市克何除消构府称太准精值号率族维划选标写存候毛亲快效斯院查江型眼王按格养易置派层片始却专状育厂京识适属圆包火住调满县局照参红细引听该铁价严")) {
      std::string s;
      utf8::append(s, c);
      out.push_back(std::move(s));
    }
    return out;
  }();
  return chars;
}

// Keys separating the independent hash streams.
enum : std::uint64_t {
  kTopic = 1, kStyle, kKind, kTopicSel, kStyleSel, kShift, kShiftWord, kSub, kAlt,
  kAltPick, kDrop, kBreak, kAnsLen, kAns, kCanon, kCanonAlt, kAnsShift, kAnsShift2,
  kFlip, kFlipTo, kFormat, kFormatDraw, kReason, kReasonDrop, kQueryWord, kQueryType, kQueryScript,
};

class Lexicon {
 public:
  explicit Lexicon(bool cjk) : cjk_(cjk) {}

  bool cjk() const noexcept { return cjk_; }

  std::string word(std::uint64_t h) const {
    if (!cjk_) {
      const auto& w = english_words();
      return w[h % w.size()];
    }
    const auto& c = cjk_chars();
    std::string out = c[h % c.size()];
    if ((h >> 40) & 1U) out += c[(h >> 20) % c.size()];
    return out;
  }

  std::string join(const std::vector<std::string>& words,
                   const std::vector<bool>& breaks) const {
    std::string out;
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (i > 0 && !cjk_) out.push_back(' ');
      out += words[i];
      if (breaks[i] && i + 1 < words.size()) out += cjk_ ? "，" : ",";
    }
    out += cjk_ ? "。" : ".";
    return out;
  }

 private:
  bool cjk_;
};

inline std::uint64_t query_key(const Query& q) { return fnv1a64(q.text, fnv1a64(q.id)); }

inline bool query_is_cjk(const Query& q) {
  return text::detect_scheme({q.text}) == text::Scheme::character;
}

// Prose from a pool of topical phrases (keyed by `pool`) mixed with the
// family's stock phrases. `noise` scales the per-draw substitution rate.
inline std::vector<std::string> compose(const SyntheticModelSpec& s, std::uint64_t qk,
                                        std::uint64_t pool, std::uint64_t draw, const Lexicon& lex,
                                        std::size_t kTopics, double topic_prob, double noise,
                                        std::uint64_t slots, std::vector<bool>& breaks) {
  constexpr std::size_t kStyles = 40;
  const std::uint64_t fam = s.family_seed;
  // phrases of 2-3 words
  auto phrase = [&](std::uint64_t key) {
    std::vector<std::string> p;
    const std::uint64_t len = 2 + key % 2;
    for (std::uint64_t w = 0; w < len; ++w) p.push_back(lex.word(mix({key, w})));
    return p;
  };
  std::vector<std::vector<std::string>> topic, style;
  for (std::uint64_t k = 0; k < kTopics; ++k) topic.push_back(phrase(mix({pool, kTopic, k})));
  for (std::uint64_t k = 0; k < kStyles; ++k) style.push_back(phrase(mix({fam, kStyle, k})));
  const double rate = std::min(0.9, noise * s.temperature_analog);
  std::vector<std::string> words;
  for (std::uint64_t j = 0; j < slots; ++j) {
    std::vector<std::string> p = to_unit(mix({fam, pool, j, kKind})) < topic_prob
                                     ? topic[mix({fam, pool, j, kTopicSel}) % kTopics]
                                     : style[mix({fam, pool, j, kStyleSel}) % kStyles];
    if (to_unit(mix({fam, pool, j, kShift})) < s.vocab_shift) p = phrase(mix({fam, pool, j, kShiftWord}));
    if (rate > 0.0) {
      if (to_unit(mix({draw, qk, j, kDrop})) < 0.25 * rate) continue;
      if (to_unit(mix({draw, qk, j, kSub})) < rate) {
        const std::uint64_t a = mix({draw, qk, j, kAlt});
        p = (mix({draw, qk, j, kAltPick}) & 1U) ? topic[a % kTopics] : style[a % kStyles];
      }
    }
    for (auto& w : p) {
      words.push_back(std::move(w));
      breaks.push_back(false);
    }
    breaks.back() = mix({fam, pool, j, kBreak}) % 4 == 0;
  }
  if (words.empty()) {
    words = topic[0];
    breaks.assign(words.size(), false);
  }
  return words;
}

// hotter sampling rambles on
inline double length_scale(const SyntheticModelSpec& s) {
  return 0.4 + 1.2 * std::min(s.temperature_analog, 1.5);
}

inline std::string open_answer(const SyntheticModelSpec& s, const Query& q,
                               std::uint64_t draw, const Lexicon& lex) {
  const std::uint64_t qk = query_key(q);
  const auto slots = static_cast<std::uint64_t>(
      std::max(2.0, std::round(s.verbosity * length_scale(s) / 2.5)));
  std::vector<bool> breaks;
  const auto words = compose(s, qk, qk, draw, lex, 12, 0.55, 0.5, slots, breaks);
  return lex.join(words, breaks);
}

inline std::string closed_answer(const SyntheticModelSpec& s, const Query& q,
                                 std::uint64_t draw, const Lexicon& lex) {
  constexpr std::uint64_t kAnswers = 4;
  const std::uint64_t qk = query_key(q);
  const std::uint64_t fam = s.family_seed;
  auto answer_text = [&](std::uint64_t k) {
    const std::uint64_t len = 1 + mix({qk, kAnsLen, k}) % 2;
    std::string out;
    for (std::uint64_t w = 0; w < len; ++w) {
      if (w > 0 && !lex.cjk()) out.push_back(' ');
      out += lex.word(mix({qk, kAns, k, w}));
    }
    return out;
  };
  std::uint64_t canon = to_unit(mix({fam, qk, kCanon})) < 0.95 ? 0 : 1 + mix({fam, qk, kCanonAlt}) % 3;
  if (to_unit(mix({fam, qk, kAnsShift})) < s.vocab_shift)
    canon = (canon + 1 + mix({fam, qk, kAnsShift2}) % 3) % kAnswers;
  std::uint64_t pick = canon;
  const double flip = std::min(1.0, s.closed_answer_flip_prob * s.temperature_analog);
  if (flip > 0.0 && to_unit(mix({draw, qk, kFlip})) < flip) pick = (canon + 1 + mix({draw, qk, kFlipTo}) % 3) % kAnswers;
  // Lead-ins are common across vendors; each family has a house style and
  // hotter sampling wanders off it.
  static const std::vector<std::string> en = {
      "", "The answer is ", "I believe the answer is ", "Short answer: ", "According to most sources it is ",
  };
  static const std::vector<std::string> zh = {"", "答案是", "我认为答案是", "简短回答：", "根据大多数资料，是"};
  const auto& leads = lex.cjk() ? zh : en;
  std::uint64_t lead = to_unit(mix({fam, qk, kFormat})) < 0.8 ? mix({fam, kFormat}) % leads.size()
                                                              : mix({fam, qk, kFormat, 1}) % leads.size();
  const double relead = std::min(1.0, 0.2 * s.temperature_analog);
  if (relead > 0.0 && to_unit(mix({draw, qk, kFormatDraw})) < relead)
    lead = mix({draw, qk, kFormatDraw, 1}) % leads.size();
  // the justification follows the answer given
  const auto slots = static_cast<std::uint64_t>(
      std::max(2.0, std::round(s.verbosity * 0.3 * length_scale(s) / 2.5)));
  std::vector<bool> breaks;
  const auto words = compose(s, qk, mix({qk, kAns, pick}), draw, lex, 3, 0.95, 0.15, slots, breaks);
  return leads[lead] + answer_text(pick) + (lex.cjk() ? "，" : ", ") + lex.join(words, breaks);
}

}  // namespace detail

// Text of one synthetic response. CJK queries get CJK responses.
inline std::string synth_text(const SyntheticModelSpec& spec, const Query& query,
                              std::uint64_t draw_seed) {
  const detail::Lexicon lex(detail::query_is_cjk(query));
  return query.qtype == QueryType::closed_end ? detail::closed_answer(spec, query, draw_seed, lex)
                                              : detail::open_answer(spec, query, draw_seed, lex);
}

inline Response synth_respond(const SyntheticModelSpec& spec, const Query& query,
                              std::uint64_t draw_seed) {
  Response r;
  r.query_id = query.id;
  r.text = synth_text(spec, query, draw_seed);
  r.params = {{"temperature", spec.temperature_analog}, {"draw_seed", draw_seed}};
  return r;
}

// Synthetic query set; ids are "<prefix>-<index>".
inline std::vector<Query> synth_queries(std::size_t n, std::uint64_t seed,
                                        double open_fraction = 0.5, double cjk_fraction = 0.0,
                                        const std::string& prefix = "q") {
  std::vector<Query> out;
  const detail::Lexicon en(false), zh(true);
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::uint64_t>(i);
    Query q;
    q.id = prefix + "-" + std::to_string(i);
    q.qtype = to_unit(mix({seed, detail::kQueryType, k})) < open_fraction ? QueryType::open_end
                                                                           : QueryType::closed_end;
    const bool cjk = to_unit(mix({seed, detail::kQueryScript, k})) < cjk_fraction;
    const auto& lex = cjk ? zh : en;
    std::string w[3];
    for (std::uint64_t m = 0; m < 3; ++m) w[m] = lex.word(mix({seed, detail::kQueryWord, k, m}));
    if (cjk) {
      q.text = q.qtype == QueryType::open_end ? "请解释" + w[0] + "与" + w[1] + "和" + w[2] + "的关系？"
                                              : "哪一个" + w[0] + "属于" + w[1] + "？";
      q.text += "（" + std::to_string(i) + "）";
    } else {
      q.text = q.qtype == QueryType::open_end
                   ? "Explain how the " + w[0] + " relates to the " + w[1] + " and the " + w[2] + "."
                   : "Which " + w[0] + " is linked to the " + w[1] + "?";
      q.text += " (#" + std::to_string(i) + ")";
    }
    out.push_back(std::move(q));
  }
  return out;
}

inline SyntheticModelSpec random_spec(CounterRng& rng) {
  SyntheticModelSpec s;
  s.family_seed = rng.next();
  s.temperature_analog = 0.3 + 0.7 * rng.uniform();
  s.vocab_shift = 0.15 * rng.uniform();
  s.closed_answer_flip_prob = 0.05 + 0.15 * rng.uniform();
  s.verbosity = 20 + static_cast<int>(rng.below(41));
  return s;
}

// Inconsistent scenarios alternate between a different family and the same
// spec with a shifted temperature.
inline std::vector<SimScenario> generate_benchmark(int n_consistent, int n_inconsistent,
                                                   const std::vector<Query>& queries,
                                                   std::uint64_t master_seed) {
  if (queries.empty()) throw InvalidArgument("generate_benchmark: no queries");
  if (n_consistent < 0 || n_inconsistent < 0) throw InvalidArgument("negative scenario count");
  std::vector<SimScenario> out;
  CounterRng rng(mix({master_seed, 0x5CE7A210}));
  for (int i = 0; i < n_consistent; ++i) {
    SimScenario sc;
    sc.spec_a = random_spec(rng);
    sc.spec_b = sc.spec_a;
    sc.ground_truth = GroundTruth::consistent;
    sc.kind = "same_spec";
    out.push_back(sc);
  }
  for (int i = 0; i < n_inconsistent; ++i) {
    SimScenario sc;
    sc.spec_a = random_spec(rng);
    sc.ground_truth = GroundTruth::inconsistent;
    if (i % 2 == 0) {
      sc.spec_b = random_spec(rng);
      sc.kind = "different_family";
    } else {
      sc.spec_b = sc.spec_a;
      const double delta = 0.3 + 0.3 * rng.uniform();
      sc.spec_b.temperature_analog = sc.spec_a.temperature_analog > 0.65
                                         ? sc.spec_a.temperature_analog - delta
                                         : sc.spec_a.temperature_analog + delta;
      sc.spec_b.temperature_analog = std::max(0.0, sc.spec_b.temperature_analog);
      sc.kind = "temperature_shift";
    }
    if (sc.spec_b == sc.spec_a) sc.spec_b.family_seed ^= 1;
    out.push_back(sc);
  }
  return out;
}

inline nlohmann::json to_json(const SyntheticModelSpec& s) {
  return {{"family_seed", s.family_seed}, {"temperature_analog", s.temperature_analog},
          {"vocab_shift", s.vocab_shift}, {"closed_answer_flip_prob", s.closed_answer_flip_prob},
          {"verbosity", s.verbosity}};
}

inline SyntheticModelSpec spec_from_json(const nlohmann::json& j) {
  SyntheticModelSpec s;
  s.family_seed = j.value("family_seed", std::uint64_t{0});
  s.temperature_analog = j.value("temperature_analog", 0.7);
  s.vocab_shift = j.value("vocab_shift", 0.0);
  s.closed_answer_flip_prob = j.value("closed_answer_flip_prob", 0.2);
  s.verbosity = j.value("verbosity", 40);
  return s;
}

inline nlohmann::json to_json(const SimScenario& s) {
  return {{"spec_a", to_json(s.spec_a)}, {"spec_b", to_json(s.spec_b)},
          {"ground_truth", s.ground_truth == GroundTruth::consistent ? "consistent" : "inconsistent"},
          {"kind", s.kind}};
}

}  // namespace simct::sim
