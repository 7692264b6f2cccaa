#include "intrarel/eval.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <unordered_map>

#include "intrarel/error.h"

namespace intrarel {

using nlohmann::json;

PRF PRF::from_counts(std::size_t tp, std::size_t predicted, std::size_t gold) {
  PRF r;
  r.true_positives = tp;
  r.predicted = predicted;
  r.support = gold;
  r.precision = predicted ? 100.0 * static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
  r.recall = gold ? 100.0 * static_cast<double>(tp) / static_cast<double>(gold) : 0.0;
  r.f1 = r.precision + r.recall > 0.0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  return r;
}

namespace {

std::unordered_map<std::string, const KeyedSpans*> index_by_key(const std::vector<KeyedSpans>& v,
                                                                const char* side) {
  std::unordered_map<std::string, const KeyedSpans*> out;
  for (const auto& k : v) {
    if (!out.emplace(k.key, &k).second) {
      throw ValidationError(std::string("duplicate ") + side + " key '" + k.key + "'");
    }
  }
  return out;
}

void check_aligned(const std::vector<KeyedSpans>& gold,
                   const std::unordered_map<std::string, const KeyedSpans*>& pred) {
  if (gold.size() != pred.size()) {
    throw ValidationError("gold and predicted key sets differ in size (" +
                          std::to_string(gold.size()) + " vs " + std::to_string(pred.size()) + ")");
  }
  for (const auto& g : gold) {
    if (!pred.count(g.key)) throw ValidationError("no prediction for key '" + g.key + "'");
  }
}

std::vector<ArgumentSpan> sorted_spans(std::vector<ArgumentSpan> spans) {
  std::sort(spans.begin(), spans.end(), [](const ArgumentSpan& a, const ArgumentSpan& b) {
    return std::tie(a.span, a.role) < std::tie(b.span, b.role);
  });
  return spans;
}

json prf_json(const PRF& p) {
  return {{"precision", p.precision}, {"recall", p.recall},       {"f1", p.f1},
          {"support", p.support},     {"predicted", p.predicted}, {"true_positives", p.true_positives}};
}

PRF prf_from(const json& j) {
  PRF p;
  p.precision = j.at("precision").get<double>();
  p.recall = j.at("recall").get<double>();
  p.f1 = j.at("f1").get<double>();
  p.support = j.at("support").get<std::size_t>();
  p.predicted = j.at("predicted").get<std::size_t>();
  p.true_positives = j.at("true_positives").get<std::size_t>();
  return p;
}

json role_json(const RolePRF& r) { return {{"arg1", prf_json(r.arg1)}, {"arg2", prf_json(r.arg2)}}; }
RolePRF role_from(const json& j) { return {prf_from(j.at("arg1")), prf_from(j.at("arg2"))}; }

void flatten_prf(std::map<std::string, double>& out, const std::string& prefix, const PRF& p) {
  out[prefix + ".precision"] = p.precision;
  out[prefix + ".recall"] = p.recall;
  out[prefix + ".f1"] = p.f1;
  out[prefix + ".support"] = static_cast<double>(p.support);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string pad(const std::string& s, std::size_t w, bool right = true) {
  if (s.size() >= w) return s;
  return right ? std::string(w - s.size(), ' ') + s : s + std::string(w - s.size(), ' ');
}

std::string prf_row(const std::string& label, const PRF& p, std::size_t label_width) {
  return pad(label, label_width, false) + pad(fmt(p.precision), 10) + pad(fmt(p.recall), 10) +
         pad(fmt(p.f1), 10) + pad(std::to_string(p.support), 10) + "\n";
}

std::string prf_header(const std::string& first, std::size_t label_width) {
  return pad(first, label_width, false) + pad("P", 10) + pad("R", 10) + pad("F1", 10) +
         pad("Support", 10) + "\n";
}

}  // namespace

RolePRF exact_match(const std::vector<KeyedSpans>& gold, const std::vector<KeyedSpans>& pred) {
  auto pred_by_key = index_by_key(pred, "predicted");
  index_by_key(gold, "gold");
  check_aligned(gold, pred_by_key);
  std::array<std::size_t, 2> tp{}, n_pred{}, n_gold{};
  for (const auto& g : gold) {
    auto gs = sorted_spans(g.spans);
    std::vector<bool> used(gs.size(), false);
    for (const auto& p : sorted_spans(pred_by_key.at(g.key)->spans)) {
      const auto r = static_cast<std::size_t>(p.role);
      ++n_pred[r];
      for (std::size_t i = 0; i < gs.size(); ++i) {
        if (!used[i] && gs[i] == p) {
          used[i] = true;
          ++tp[r];
          break;
        }
      }
    }
    for (const auto& s : gs) ++n_gold[static_cast<std::size_t>(s.role)];
  }
  return {PRF::from_counts(tp[0], n_pred[0], n_gold[0]), PRF::from_counts(tp[1], n_pred[1], n_gold[1])};
}

std::array<PRF, kNumLabels> token_prf(const std::vector<TagSequence>& gold,
                                      const std::vector<TagSequence>& pred) {
  if (gold.size() != pred.size()) throw ValidationError("gold and predicted sequence counts differ");
  std::array<std::size_t, kNumLabels> tp{}, np{}, ng{};
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i].size() != pred[i].size()) {
      throw ValidationError("tag sequence " + std::to_string(i) + " has mismatched lengths");
    }
    for (std::size_t j = 0; j < gold[i].size(); ++j) {
      const auto g = label_index(gold[i][j]), p = label_index(pred[i][j]);
      ++ng[g];
      ++np[p];
      if (g == p) ++tp[g];
    }
  }
  std::array<PRF, kNumLabels> out;
  for (std::size_t l = 0; l < kNumLabels; ++l) out[l] = PRF::from_counts(tp[l], np[l], ng[l]);
  return out;
}

double token_accuracy(const std::vector<TagSequence>& gold, const std::vector<TagSequence>& pred) {
  auto t = token_prf(gold, pred);
  std::size_t tp = 0, n = 0;
  for (const auto& p : t) {
    tp += p.true_positives;
    n += p.support;
  }
  return n ? 100.0 * static_cast<double>(tp) / static_cast<double>(n) : 0.0;
}

std::optional<ArgOrder> argument_order(const std::vector<ArgumentSpan>& spans) {
  std::optional<std::size_t> a1, a2;
  for (const auto& s : spans) {
    auto& slot = s.role == Role::kArg1 ? a1 : a2;
    if (!slot || s.span.start < *slot) slot = s.span.start;
  }
  if (!a1 || !a2) return std::nullopt;
  return *a1 < *a2 ? ArgOrder::kArg1Arg2 : ArgOrder::kArg2Arg1;
}

OrderReport order_score(const std::vector<KeyedSpans>& gold, const std::vector<KeyedSpans>& pred) {
  auto pred_by_key = index_by_key(pred, "predicted");
  check_aligned(gold, pred_by_key);
  std::array<std::size_t, 2> tp{}, np{}, ng{};
  for (const auto& g : gold) {
    auto go = argument_order(g.spans);
    if (!go) continue;
    ++ng[static_cast<std::size_t>(*go)];
    auto po = argument_order(pred_by_key.at(g.key)->spans);
    if (!po) continue;
    ++np[static_cast<std::size_t>(*po)];
    if (*po == *go) ++tp[static_cast<std::size_t>(*go)];
  }
  return {PRF::from_counts(tp[0], np[0], ng[0]), PRF::from_counts(tp[1], np[1], ng[1])};
}

SenseReport sense_report(const std::vector<SenseLabel>& gold, const std::vector<SenseLabel>& pred) {
  if (gold.size() != pred.size()) throw ValidationError("gold and predicted label counts differ");
  SenseReport r;
  r.n = gold.size();
  std::array<std::size_t, kNumSenses> tp{}, np{}, ng{};
  std::size_t correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto g = sense_index(gold[i]), p = sense_index(pred[i]);
    ++r.confusion[g][p];
    ++ng[g];
    ++np[p];
    if (g == p) {
      ++tp[g];
      ++correct;
    }
  }
  for (std::size_t c = 0; c < kNumSenses; ++c) r.per_sense[c] = PRF::from_counts(tp[c], np[c], ng[c]);
  r.micro = PRF::from_counts(correct, r.n, r.n);
  r.accuracy = r.n ? 100.0 * static_cast<double>(correct) / static_cast<double>(r.n) : 0.0;
  r.weighted.support = r.n;
  r.weighted.predicted = r.n;
  r.weighted.true_positives = correct;
  if (r.n > 0) {
    for (std::size_t c = 0; c < kNumSenses; ++c) {
      const double w = static_cast<double>(ng[c]) / static_cast<double>(r.n);
      r.weighted.precision += w * r.per_sense[c].precision;
      r.weighted.recall += w * r.per_sense[c].recall;
      r.weighted.f1 += w * r.per_sense[c].f1;
    }
  }
  return r;
}

std::vector<SliceReport> slice_eval(const std::vector<SliceItem>& items, std::size_t sense_threshold) {
  auto make = [&](const std::string& name, auto keep) {
    std::vector<KeyedSpans> g, p;
    for (const auto& it : items) {
      if (!keep(it)) continue;
      g.push_back(it.gold);
      p.push_back(it.pred);
    }
    return SliceReport{name, g.size(), exact_match(g, p)};
  };
  auto multi = [](const SliceItem& it) { return it.relations_in_sentence >= 2 && it.sense.has_value(); };
  auto left = [](const SliceItem& it) { return 2 * it.position < it.relations_in_sentence; };

  std::vector<SliceReport> out;
  out.push_back(make("multi-relation", multi));
  out.push_back(make("multi-relation-left", [&](const SliceItem& it) { return multi(it) && left(it); }));
  out.push_back(make("multi-relation-right", [&](const SliceItem& it) { return multi(it) && !left(it); }));

  std::array<std::size_t, kNumSenses> counts{};
  for (const auto& it : items) {
    if (it.sense) ++counts[sense_index(*it.sense)];
  }
  for (std::size_t c = 0; c < kNumSenses; ++c) {
    if (counts[c] <= sense_threshold) continue;
    const SenseLabel s = sense_from_index(c);
    out.push_back(make("sense:" + std::string(to_string(s)),
                       [s](const SliceItem& it) { return it.sense == s; }));
  }
  return out;
}

json EvalReport::to_json() const {
  json j = {{"name", name}, {"n_examples", n_examples}};
  if (exact) j["exact"] = role_json(*exact);
  if (tokens) {
    json t = json::object();
    for (std::size_t l = 0; l < kNumLabels; ++l) {
      t[std::string(to_string(label_from_index(l)))] = prf_json((*tokens)[l]);
    }
    j["tokens"] = t;
  }
  if (token_accuracy) j["token_accuracy"] = *token_accuracy;
  if (order) j["order"] = {{"Arg1-Arg2", prf_json(order->arg1_arg2)}, {"Arg2-Arg1", prf_json(order->arg2_arg1)}};
  if (sense) {
    json per = json::object();
    json conf = json::array();
    for (std::size_t c = 0; c < kNumSenses; ++c) {
      per[std::string(to_string(sense_from_index(c)))] = prf_json(sense->per_sense[c]);
      conf.push_back(sense->confusion[c]);
    }
    j["sense"] = {{"per_sense", per},
                  {"micro", prf_json(sense->micro)},
                  {"weighted", prf_json(sense->weighted)},
                  {"accuracy", sense->accuracy},
                  {"n", sense->n},
                  {"confusion", conf}};
  }
  if (!slices.empty()) {
    json s = json::array();
    for (const auto& sl : slices) s.push_back({{"name", sl.name}, {"size", sl.size}, {"exact", role_json(sl.exact)}});
    j["slices"] = s;
  }
  return j;
}

EvalReport EvalReport::from_json(const json& j) {
  try {
    EvalReport r;
    r.name = j.at("name").get<std::string>();
    r.n_examples = j.at("n_examples").get<std::size_t>();
    if (j.contains("exact")) r.exact = role_from(j.at("exact"));
    if (j.contains("tokens")) {
      std::array<PRF, kNumLabels> t;
      for (std::size_t l = 0; l < kNumLabels; ++l) {
        t[l] = prf_from(j.at("tokens").at(std::string(to_string(label_from_index(l)))));
      }
      r.tokens = t;
    }
    if (j.contains("token_accuracy")) r.token_accuracy = j.at("token_accuracy").get<double>();
    if (j.contains("order")) {
      r.order = OrderReport{prf_from(j.at("order").at("Arg1-Arg2")), prf_from(j.at("order").at("Arg2-Arg1"))};
    }
    if (j.contains("sense")) {
      const json& s = j.at("sense");
      SenseReport sr;
      for (std::size_t c = 0; c < kNumSenses; ++c) {
        sr.per_sense[c] = prf_from(s.at("per_sense").at(std::string(to_string(sense_from_index(c)))));
        sr.confusion[c] = s.at("confusion").at(c).get<std::array<std::size_t, kNumSenses>>();
      }
      sr.micro = prf_from(s.at("micro"));
      sr.weighted = prf_from(s.at("weighted"));
      sr.accuracy = s.at("accuracy").get<double>();
      sr.n = s.at("n").get<std::size_t>();
      r.sense = sr;
    }
    if (j.contains("slices")) {
      for (const auto& sl : j.at("slices")) {
        r.slices.push_back({sl.at("name").get<std::string>(), sl.at("size").get<std::size_t>(),
                            role_from(sl.at("exact"))});
      }
    }
    return r;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed evaluation report: ") + e.what());
  }
}

std::map<std::string, double> EvalReport::flatten() const {
  std::map<std::string, double> out;
  out["n_examples"] = static_cast<double>(n_examples);
  if (exact) {
    flatten_prf(out, "exact.arg1", exact->arg1);
    flatten_prf(out, "exact.arg2", exact->arg2);
  }
  if (tokens) {
    for (std::size_t l = 0; l < kNumLabels; ++l) {
      flatten_prf(out, "tokens." + std::string(to_string(label_from_index(l))), (*tokens)[l]);
    }
  }
  if (token_accuracy) out["token_accuracy"] = *token_accuracy;
  if (order) {
    flatten_prf(out, "order.Arg1-Arg2", order->arg1_arg2);
    flatten_prf(out, "order.Arg2-Arg1", order->arg2_arg1);
  }
  if (sense) {
    out["sense.accuracy"] = sense->accuracy;
    flatten_prf(out, "sense.micro", sense->micro);
    flatten_prf(out, "sense.weighted", sense->weighted);
  }
  for (const auto& sl : slices) {
    out["slices." + sl.name + ".size"] = static_cast<double>(sl.size);
    flatten_prf(out, "slices." + sl.name + ".arg1", sl.exact.arg1);
    flatten_prf(out, "slices." + sl.name + ".arg2", sl.exact.arg2);
  }
  return out;
}

json CrossvalSummary::to_json() const {
  json m = json::object();
  for (const auto& [k, v] : metrics) m[k] = {{"mean", v.mean}, {"std", v.std}};
  return {{"folds", folds}, {"metrics", m}};
}

CrossvalSummary crossval_aggregate(const std::vector<EvalReport>& reports) {
  if (reports.size() < 2) throw ValidationError("cross-validation needs at least two fold reports");
  std::vector<std::map<std::string, double>> flat;
  for (const auto& r : reports) flat.push_back(r.flatten());
  for (std::size_t i = 1; i < flat.size(); ++i) {
    bool same = flat[i].size() == flat[0].size();
    for (auto a = flat[0].begin(), b = flat[i].begin(); same && a != flat[0].end(); ++a, ++b) {
      same = a->first == b->first;
    }
    if (!same) throw ValidationError("fold report " + std::to_string(i) + " has a different schema");
  }
  CrossvalSummary s;
  s.folds = reports.size();
  const double n = static_cast<double>(reports.size());
  for (const auto& [key, _] : flat[0]) {
    double sum = 0.0;
    for (const auto& f : flat) sum += f.at(key);
    const double mean = sum / n;
    double sq = 0.0;
    for (const auto& f : flat) sq += (f.at(key) - mean) * (f.at(key) - mean);
    s.metrics[key] = {mean, std::sqrt(sq / (n - 1.0))};
  }
  return s;
}

std::string format_exact_table(const RolePRF& r) {
  return prf_header("Argument", 12) + prf_row("Arg1", r.arg1, 12) + prf_row("Arg2", r.arg2, 12);
}

std::string format_token_table(const std::array<PRF, kNumLabels>& t) {
  std::string out = prf_header("Label", 12);
  for (std::size_t l = 0; l < kNumLabels; ++l) out += prf_row(std::string(to_string(label_from_index(l))), t[l], 12);
  return out;
}

std::string format_order_table(const OrderReport& r) {
  return prf_header("Order", 12) + prf_row("Arg1-Arg2", r.arg1_arg2, 12) + prf_row("Arg2-Arg1", r.arg2_arg1, 12);
}

std::string format_sense_table(const SenseReport& r) {
  const std::size_t w = 36;
  std::string out = prf_header("Sense", w);
  for (std::size_t c = 0; c < kNumSenses; ++c) {
    out += prf_row(std::string(to_string(sense_from_index(c))), r.per_sense[c], w);
  }
  out += prf_row("Micro average", r.micro, w);
  out += prf_row("Weighted average", r.weighted, w);
  return out;
}

std::string format_slice_table(const std::vector<SliceReport>& slices) {
  const std::size_t w = 40;
  std::string out = pad("Condition", w, false) + pad("Size", 8) + pad("Arg1 P", 9) + pad("Arg1 R", 9) +
                    pad("Arg1 F1", 9) + pad("Arg2 P", 9) + pad("Arg2 R", 9) + pad("Arg2 F1", 9) + "\n";
  for (const auto& s : slices) {
    out += pad(s.name, w, false) + pad(std::to_string(s.size), 8) + pad(fmt(s.exact.arg1.precision), 9) +
           pad(fmt(s.exact.arg1.recall), 9) + pad(fmt(s.exact.arg1.f1), 9) +
           pad(fmt(s.exact.arg2.precision), 9) + pad(fmt(s.exact.arg2.recall), 9) +
           pad(fmt(s.exact.arg2.f1), 9) + "\n";
  }
  return out;
}

std::string format_crossval_table(const CrossvalSummary& s) {
  std::size_t w = 10;
  for (const auto& [k, _] : s.metrics) w = std::max(w, k.size() + 2);
  std::string out = pad("Metric (" + std::to_string(s.folds) + " folds)", w, false) + pad("Mean", 10) +
                    pad("Std", 10) + "\n";
  for (const auto& [k, v] : s.metrics) out += pad(k, w, false) + pad(fmt(v.mean), 10) + pad(fmt(v.std), 10) + "\n";
  return out;
}

std::string format_report(const EvalReport& r) {
  std::ostringstream out;
  out << "== " << (r.name.empty() ? "report" : r.name) << " (" << r.n_examples << " examples)\n";
  if (r.exact) out << "\nExact match\n" << format_exact_table(*r.exact);
  if (r.tokens) out << "\nToken labels\n" << format_token_table(*r.tokens);
  if (r.token_accuracy) out << "Token accuracy: " << fmt(*r.token_accuracy) << "\n";
  if (r.order) out << "\nArgument order\n" << format_order_table(*r.order);
  if (r.sense) out << "\nSenses\n" << format_sense_table(*r.sense) << "Accuracy: " << fmt(r.sense->accuracy) << "\n";
  if (!r.slices.empty()) out << "\nConditions\n" << format_slice_table(r.slices);
  return out.str();
}

std::string confusion_csv(const SenseReport& r) {
  std::ostringstream out;
  out << "gold\\pred";
  for (std::size_t c = 0; c < kNumSenses; ++c) out << ',' << to_string(sense_from_index(c));
  out << '\n';
  for (std::size_t g = 0; g < kNumSenses; ++g) {
    out << to_string(sense_from_index(g));
    for (std::size_t p = 0; p < kNumSenses; ++p) out << ',' << r.confusion[g][p];
    out << '\n';
  }
  return out.str();
}

}  // namespace intrarel
