#include "relevance/generators.hpp"

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "relevance/error.hpp"
#include "relevance/relevance.hpp"
#include "relevance/rng.hpp"

namespace relevance {

using nlohmann::json;

std::string_view to_string(DomainKind domain) { return domain == DomainKind::Coffee ? "coffee" : "cereal"; }
std::string_view to_string(Difficulty difficulty) { return difficulty == Difficulty::Simple ? "simple" : "hard"; }

DomainKind parse_domain(std::string_view text) {
  if (text == "coffee") return DomainKind::Coffee;
  if (text == "cereal") return DomainKind::Cereal;
  throw Error(ErrorKind::ParseError, "unknown domain '" + std::string(text) + "'");
}

Difficulty parse_difficulty(std::string_view text) {
  if (text == "simple") return Difficulty::Simple;
  if (text == "hard") return Difficulty::Hard;
  throw Error(ErrorKind::ParseError, "unknown difficulty '" + std::string(text) + "'");
}

std::string ProblemInstance::case_id() const {
  return std::string(to_string(domain)) + "-" + std::string(to_string(difficulty)) + "-" + std::to_string(seed);
}

namespace {

using Triple = std::array<double, 3>;

struct ClassDef {
  std::string id;
  std::string criterion;
  Triple p;  // P(C | task_k, O) for the domain's three tasks
};

struct ItemDef {
  std::string id;
  std::string name;
  std::string class_id;
  double p_high;
  bool ground_truth = false;
  bool container = false;
};

struct StageDef {
  std::vector<std::string> requires_cues;
  Triple p;
};

struct DomainDef {
  Objective objective;
  std::array<TaskSpec, 3> tasks;
  std::vector<StageDef> stages;
  std::vector<ClassDef> classes;
  std::vector<ClassDef> distractor_classes;
  std::vector<ItemDef> simple_items;
  std::vector<ItemDef> hard_items;
  std::vector<std::pair<std::string, std::string>> inside;  // (container, item)
  std::vector<std::pair<std::string, std::string>> on_top;  // (top, bottom)
  ItemDef borderline;
  Position human;
  int distractors_min[2];
  int distractors_max[2];
  int random_stackings[2];
};

// Distractor taxonomy. Serveware is the one class that clears the default
// class threshold; its members stay well under the element threshold.
const std::vector<std::pair<std::string, std::string>> kDistractorCriteria = {
    {"cookware", "stovetop pots and pans"},
    {"bakeware", "oven baking equipment"},
    {"prep_tools", "food preparation tools"},
    {"storage_ware", "food storage supplies"},
    {"cleaning", "dishwashing and cleaning supplies"},
    {"serveware", "platters and vessels for serving food"},
    {"small_appliances", "countertop cooking appliances"},
    {"linens", "kitchen textiles"},
};

std::vector<ClassDef> distractor_classes(const std::array<Triple, 8>& p) {
  std::vector<ClassDef> out;
  for (std::size_t i = 0; i < kDistractorCriteria.size(); ++i)
    out.push_back({kDistractorCriteria[i].first, kDistractorCriteria[i].second, p[i]});
  return out;
}

const DomainDef& coffee_def() {
  static const DomainDef def = [] {
    DomainDef d;
    d.objective = {"conference_break", "get something to drink at the break of a conference"};
    d.tasks = {TaskSpec{"cold_brew", "drink cold brew coffee"}, TaskSpec{"hot_tea", "drink hot tea"},
               TaskSpec{"snack", "eat a snack"}};
    d.stages = {
        {{}, {0.45, 0.30, 0.25}},
        {{"utterance:coffee"}, {0.90, 0.04, 0.06}},
        {{"motion:grab_coffee"}, {0.92, 0.03, 0.05}},
        {{"task:cold_brew"}, {0.96, 0.02, 0.02}},
        {{"utterance:tea"}, {0.08, 0.86, 0.06}},
        {{"task:hot_tea"}, {0.02, 0.96, 0.02}},
        {{"utterance:snack"}, {0.05, 0.05, 0.90}},
        {{"task:snack"}, {0.02, 0.02, 0.96}},
    };
    d.classes = {
        {"drinks", "beverages and drink ingredients", {0.97, 0.95, 0.30}},
        {"dairy", "milk and creamer products", {0.88, 0.55, 0.05}},
        {"drinkware", "cups and vessels to drink from", {0.92, 0.90, 0.10}},
        {"utensils", "handheld eating and stirring utensils", {0.75, 0.70, 0.35}},
        {"paper_goods", "disposable paper products", {0.62, 0.55, 0.60}},
        {"desserts", "sweet baked snacks", {0.05, 0.15, 0.95}},
        {"fruit", "fresh fruit", {0.03, 0.05, 0.70}},
        {"appliances", "electric drink appliances", {0.05, 0.60, 0.05}},
    };
    d.distractor_classes = distractor_classes({{{0.04, 0.05, 0.03},
                                                {0.02, 0.02, 0.10},
                                                {0.06, 0.06, 0.08},
                                                {0.05, 0.05, 0.05},
                                                {0.02, 0.02, 0.02},
                                                {0.30, 0.30, 0.40},
                                                {0.12, 0.30, 0.05},
                                                {0.03, 0.03, 0.03}}});
    d.simple_items = {
        {"coffee", "coffee", "drinks", 0.99, true},
        {"tea_bag", "tea bag", "drinks", 0.08},
        {"orange_juice", "orange juice", "drinks", 0.10},
        {"water_bottle", "water bottle", "drinks", 0.12},
        {"creamer", "creamer", "dairy", 0.80, true},
        {"whole_milk", "whole milk", "dairy", 0.62, true},
        {"reduced_milk", "reduced milk", "dairy", 0.45, true},
        {"plastic_cup_1", "plastic cup", "drinkware", 0.85, true},
        {"plastic_cup_2", "plastic cup", "drinkware", 0.85, true},
        {"paper_cup_1", "paper cup", "drinkware", 0.50, true},
        {"stir_stick_1", "stir stick", "utensils", 0.70, true},
        {"fork", "fork", "utensils", 0.10},
        {"napkin_1", "napkin", "paper_goods", 0.60, true},
        {"paper_plate", "paper plate", "paper_goods", 0.15},
        {"donut", "donut", "desserts", 0.10},
        {"muffin", "muffin", "desserts", 0.10},
        {"cookie", "cookie", "desserts", 0.12},
        {"banana", "banana", "fruit", 0.20},
        {"electric_kettle", "electric kettle", "appliances", 0.30},
    };
    d.hard_items = {
        {"plastic_cup_3", "plastic cup", "drinkware", 0.85, true},
        {"paper_cup_2", "paper cup", "drinkware", 0.50, true},
        {"stir_stick_2", "stir stick", "utensils", 0.70, true},
        {"napkin_2", "napkin", "paper_goods", 0.60, true},
        {"croissant", "croissant", "desserts", 0.10},
        {"bagel", "bagel", "desserts", 0.10},
        {"cake_slice", "cake slice", "desserts", 0.10},
        {"apple", "apple", "fruit", 0.20},
        {"grapes", "grapes", "fruit", 0.20},
        {"sparkling_water", "sparkling water", "drinks", 0.12},
        {"soda_can", "soda can", "drinks", 0.08},
        {"lemonade", "lemonade", "drinks", 0.10},
        {"espresso_machine", "espresso machine", "appliances", 0.50},
        {"spoon", "spoon", "utensils", 0.15},
        {"knife", "knife", "utensils", 0.05},
        {"paper_towel", "paper towel", "paper_goods", 0.18},
        {"sugar_packet", "sugar packet", "drinks", 0.10},
    };
    d.borderline = {"ice_bucket", "ice bucket", "drinkware", 0.0};
    d.human = {0.0, -0.6, 0.75};
    d.distractors_min[0] = 10, d.distractors_max[0] = 30, d.random_stackings[0] = 3;
    d.distractors_min[1] = 20, d.distractors_max[1] = 50, d.random_stackings[1] = 8;
    return d;
  }();
  return def;
}

const DomainDef& cereal_def() {
  static const DomainDef def = [] {
    DomainDef d;
    d.objective = {"breakfast", "have breakfast in the kitchen"};
    d.tasks = {TaskSpec{"eat_cereal", "eat a bowl of cereal with milk"}, TaskSpec{"make_toast", "make toast"},
               TaskSpec{"drink_juice", "drink a glass of juice"}};
    d.stages = {
        {{}, {0.40, 0.35, 0.25}},
        {{"utterance:cereal"}, {0.90, 0.05, 0.05}},
        {{"motion:open_cabinet"}, {0.80, 0.12, 0.08}},
        {{"task:eat_cereal"}, {0.96, 0.02, 0.02}},
        {{"utterance:toast"}, {0.05, 0.90, 0.05}},
        {{"task:make_toast"}, {0.02, 0.96, 0.02}},
        {{"utterance:juice"}, {0.05, 0.05, 0.90}},
        {{"task:drink_juice"}, {0.02, 0.02, 0.96}},
    };
    d.classes = {
        {"storage", "closed furniture that holds items", {0.95, 0.80, 0.85}},
        {"cereals", "breakfast cereals", {0.97, 0.10, 0.05}},
        {"dishware", "bowls plates and mugs", {0.93, 0.70, 0.40}},
        {"dairy", "milk products", {0.90, 0.60, 0.10}},
        {"drinks", "bottled drinks", {0.10, 0.20, 0.97}},
        {"cutlery", "eating utensils", {0.88, 0.60, 0.10}},
        {"condiments", "spreads and sweeteners", {0.35, 0.30, 0.05}},
        {"fruit", "fresh fruit", {0.45, 0.05, 0.10}},
        {"appliances", "breakfast appliances", {0.05, 0.90, 0.10}},
        {"paper_goods", "disposable paper products", {0.60, 0.50, 0.30}},
    };
    d.distractor_classes = distractor_classes({{{0.03, 0.15, 0.02},
                                                {0.02, 0.05, 0.02},
                                                {0.05, 0.20, 0.05},
                                                {0.06, 0.05, 0.05},
                                                {0.02, 0.02, 0.02},
                                                {0.30, 0.35, 0.30},
                                                {0.08, 0.55, 0.10},
                                                {0.03, 0.03, 0.03}}});
    d.simple_items = {
        {"cabinet", "cabinet", "storage", 0.90, true, true},
        {"fridge", "fridge", "storage", 0.85, true, true},
        {"drawer", "drawer", "storage", 0.80, true, true},
        {"cereal_box", "cereal box", "cereals", 0.98, true},
        {"granola", "granola", "cereals", 0.12},
        {"bowl_1", "bowl", "dishware", 0.90, true},
        {"bowl_2", "bowl", "dishware", 0.90, true},
        {"plate_1", "plate", "dishware", 0.10},
        {"plate_2", "plate", "dishware", 0.10},
        {"mug", "mug", "dishware", 0.12},
        {"milk", "milk", "dairy", 0.95, true},
        {"yogurt", "yogurt", "dairy", 0.12},
        {"butter", "butter", "dairy", 0.08},
        {"orange_juice", "orange juice", "drinks", 0.05},
        {"spoon_1", "spoon", "cutlery", 0.90, true},
        {"spoon_2", "spoon", "cutlery", 0.90, true},
        {"fork", "fork", "cutlery", 0.08},
        {"knife", "knife", "cutlery", 0.10},
    };
    d.hard_items = {
        {"sugar", "sugar", "condiments", 0.30},
        {"honey", "honey", "condiments", 0.20},
        {"jam_jar", "jam jar", "condiments", 0.10},
        {"banana", "banana", "fruit", 0.20},
        {"apple", "apple", "fruit", 0.10},
        {"toaster", "toaster", "appliances", 0.60},
        {"kettle", "kettle", "appliances", 0.30},
        {"napkin", "napkin", "paper_goods", 0.60, true},
    };
    d.inside = {
        {"cabinet", "cereal_box"}, {"cabinet", "granola"}, {"cabinet", "bowl_1"}, {"cabinet", "bowl_2"},
        {"cabinet", "plate_1"},    {"cabinet", "plate_2"}, {"cabinet", "mug"},    {"fridge", "milk"},
        {"fridge", "yogurt"},      {"fridge", "butter"},   {"fridge", "orange_juice"}, {"drawer", "spoon_1"},
        {"drawer", "spoon_2"},     {"drawer", "fork"},     {"drawer", "knife"},
    };
    d.on_top = {{"bowl_2", "bowl_1"}, {"plate_2", "plate_1"}, {"mug", "plate_2"}, {"yogurt", "butter"},
                {"fork", "knife"}};
    d.borderline = {"berries", "berries", "fruit", 0.0};
    d.human = {0.0, -0.6, 0.9};
    d.distractors_min[0] = 10, d.distractors_max[0] = 45, d.random_stackings[0] = 0;
    d.distractors_min[1] = 30, d.distractors_max[1] = 60, d.random_stackings[1] = 0;
    return d;
  }();
  return def;
}

const Position kCabinet{-0.8, 0.8, 1.2};
const Position kFridge{0.9, 0.9, 1.0};
const Position kDrawer{0.0, 0.6, 0.8};
constexpr double kStackHeight = 0.08;
constexpr double kBorderlineProbability = 0.1;

std::string slug(const std::string& name) {
  std::string out;
  for (char c : name) {
    if (std::isalnum(static_cast<unsigned char>(c)))
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    else if (!out.empty() && out.back() != '_')
      out += '_';
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

struct Draft {
  std::vector<ItemDef> items;
  std::vector<Position> positions;
  std::vector<SpatialConstraint> constraints;
};

std::size_t index_of(const Draft& d, const std::string& id) {
  for (std::size_t i = 0; i < d.items.size(); ++i)
    if (d.items[i].id == id) return i;
  throw std::logic_error("generator: no item " + id);
}

Position table_spot(Rng& rng) { return {rng.uniform(-1.2, 1.2), rng.uniform(0.3, 1.5), 0.75}; }

// Random stacking: a free item goes on top of a clear item, never closing a cycle.
void add_random_stackings(Draft& d, int count, Rng& rng) {
  const auto n = static_cast<std::int64_t>(d.items.size());
  int placed = 0;
  for (int attempts = 0; placed < count && attempts < 1000; ++attempts) {
    const auto& top = d.items[static_cast<std::size_t>(rng.uniform_int(0, n - 1))].id;
    const auto& bottom = d.items[static_cast<std::size_t>(rng.uniform_int(0, n - 1))].id;
    if (top == bottom) continue;
    bool ok = true;
    for (const auto& c : d.constraints)
      if (c.relation == SupportRelation::OnTopOf && (c.blocker_id == top || c.blocked_id == bottom)) ok = false;
    // Everything already resting on `top` would end up under it.
    if (!ok || constraint_closure(IdSet{top}, d.constraints).contains(bottom)) continue;
    d.constraints.push_back({top, bottom, SupportRelation::OnTopOf});
    ++placed;
  }
}

void settle_stacks(Draft& d) {
  for (std::size_t round = 0; round < d.constraints.size(); ++round)
    for (const auto& c : d.constraints)
      if (c.relation == SupportRelation::OnTopOf) {
        auto& top = d.positions[index_of(d, c.blocker_id)];
        const auto& bottom = d.positions[index_of(d, c.blocked_id)];
        top = {bottom.x, bottom.y, bottom.z + kStackHeight};
      }
}

struct BuildOptions {
  bool distractors = true;
  bool jitter = true;
  bool random_positions = true;
};

TaskDistribution stage_distribution(const DomainDef& def, const Triple& p) {
  TaskDistribution dist;
  for (std::size_t k = 0; k < 3; ++k) dist[def.tasks[k].id] = p[k];
  return dist;
}

ProblemInstance build(DomainKind kind, Difficulty difficulty, std::uint64_t seed, const BuildOptions& opts) {
  const DomainDef& def = kind == DomainKind::Coffee ? coffee_def() : cereal_def();
  const int level = difficulty == Difficulty::Simple ? 0 : 1;
  Rng rng(mix_seed(seed, kind == DomainKind::Coffee ? 11 : 23));

  ProblemInstance inst;
  inst.domain = kind;
  inst.difficulty = difficulty;
  inst.seed = seed;
  inst.objective = def.objective;
  inst.tasks.assign(def.tasks.begin(), def.tasks.end());
  inst.human_position = def.human;
  inst.cues = {"task:" + def.tasks[0].id};

  Draft d;
  d.items = def.simple_items;
  if (level == 1) d.items.insert(d.items.end(), def.hard_items.begin(), def.hard_items.end());
  for (const auto& item : d.items)
    if (item.ground_truth) inst.ground_truth_relevant.insert(item.id);

  // Distractors, possibly with one borderline object taking a slot.
  std::size_t borderline_index = SIZE_MAX;
  if (opts.distractors) {
    auto count = rng.uniform_int(def.distractors_min[level], def.distractors_max[level]);
    if (rng.bernoulli(kBorderlineProbability)) {
      --count;
      borderline_index = d.items.size();
      d.items.push_back(def.borderline);
      inst.borderline = def.borderline.id;
    }
    std::vector<std::size_t> order(kitchenware_pool().size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    for (std::int64_t i = 0; i < count; ++i) {
      const auto& t = kitchenware_pool()[order[static_cast<std::size_t>(i)]];
      d.items.push_back({slug(t.name), t.name, t.class_id, t.p_high});
    }
  }

  // Positions.
  Rng spots(opts.random_positions ? mix_seed(seed, 101) : 0);
  auto container_pos = [&](const std::string& id) {
    return id == "cabinet" ? kCabinet : id == "fridge" ? kFridge : kDrawer;
  };
  d.positions.resize(d.items.size());
  for (std::size_t i = 0; i < d.items.size(); ++i)
    d.positions[i] = d.items[i].container ? container_pos(d.items[i].id) : table_spot(spots);
  for (const auto& [container, item] : def.inside) {
    const auto c = container_pos(container);
    d.positions[index_of(d, item)] = {c.x + spots.uniform(-0.15, 0.15), c.y + spots.uniform(-0.1, 0.1), c.z};
    d.constraints.push_back({container, item, SupportRelation::Inside});
  }
  for (const auto& [top, bottom] : def.on_top) d.constraints.push_back({top, bottom, SupportRelation::OnTopOf});
  if (opts.distractors) add_random_stackings(d, def.random_stackings[level], rng);
  settle_stacks(d);

  // Per-instance jitter of the oracle: class entries +-0.02, P(h) x U[0.95, 1.05].
  std::map<std::string, Triple> class_p;
  for (const auto* group : {&def.classes, &def.distractor_classes})
    for (const auto& c : *group) {
      Triple p = c.p;
      if (opts.jitter)
        for (auto& v : p) v = std::clamp(v + rng.uniform(-0.02, 0.02), 0.0, 1.0);
      class_p[c.id] = p;
    }
  std::map<std::string, double> type_p_high;
  for (const auto& item : d.items) {
    if (type_p_high.contains(item.name)) continue;
    double p = item.p_high;
    if (opts.jitter) p = std::min(1.0, p * rng.uniform(0.95, 1.05));
    type_p_high[item.name] = p;
  }

  const TaskDistribution declared = stage_distribution(def, def.stages[3].p);
  auto class_score = [&](const std::string& class_id) {
    double r = 0.0;
    for (std::size_t k = 0; k < 3; ++k) r += class_p.at(class_id)[k] * declared.at(def.tasks[k].id);
    return r;
  };
  if (borderline_index != SIZE_MAX) {
    const auto& b = d.items[borderline_index];
    type_p_high[b.name] = rng.uniform(0.15, 0.25) / class_score(b.class_id);
  }

  // Elements, shuffled so that id order carries no information.
  std::vector<Element> elements;
  for (std::size_t i = 0; i < d.items.size(); ++i) {
    const auto& item = d.items[i];
    Element e;
    e.id = item.id;
    e.name = item.name;
    e.class_id = item.class_id;
    e.attributes["type"] = item.name;
    e.attributes["kind"] = item.container ? "container" : "item";
    e.attributes["role"] = i == borderline_index                       ? "borderline"
                           : i >= def.simple_items.size() + (level ? def.hard_items.size() : 0) ? "distractor"
                                                                                                 : "base";
    e.position = d.positions[i];
    elements.push_back(std::move(e));
  }
  rng.shuffle(elements);

  std::vector<AttributeClass> classes;
  for (const auto* group : {&def.classes, &def.distractor_classes})
    for (const auto& c : *group) {
      AttributeClass cls{c.id, c.id, c.criterion, {}};
      for (const auto& e : elements)
        if (e.class_id == c.id) cls.member_ids.push_back(e.id);
      if (!cls.member_ids.empty()) classes.push_back(std::move(cls));
    }
  inst.scene = build_scene(elements, classes, d.constraints);

  // Oracle table.
  ProbabilityTable& table = inst.oracle_table;
  table.objectives[def.objective.id] = def.objective;
  table.tasks = inst.tasks;
  for (const auto& s : def.stages)
    table.stages.push_back({s.requires_cues, {{def.objective.id, stage_distribution(def, s.p)}}});
  for (const auto& cls : inst.scene.classes())
    for (std::size_t k = 0; k < 3; ++k)
      table.class_given_task[{cls.id, def.tasks[k].id, def.objective.id}] = class_p.at(cls.id)[k];
  for (const auto& cls : inst.scene.classes()) {
    std::map<std::string, std::vector<const Element*>> by_type;
    for (const auto& id : cls.member_ids) {
      const auto& e = inst.scene.element(id);
      by_type[e.type()].push_back(&e);
      table.high_given_class[{e.type(), cls.id, def.objective.id}] = type_p_high.at(e.type());
    }
    // Duplicates: the nearest one is the likeliest referent.
    for (auto& [type, members] : by_type) {
      std::sort(members.begin(), members.end(), [&](const Element* a, const Element* b) {
        const double da = a->position->distance_to(def.human), db = b->position->distance_to(def.human);
        return da != db ? da < db : a->id < b->id;
      });
      for (std::size_t rank = 0; rank < members.size(); ++rank)
        table.element_given_high[{members[rank]->id, cls.id, def.objective.id}] =
            1.0 / (1.0 + 0.25 * static_cast<double>(rank));
    }
  }
  table.validate();

  // Planning goal: serve the key items; hard variants also put some back.
  auto nearest = [&](const std::string& type) {
    const Element* best = nullptr;
    for (const auto& e : inst.scene.elements())
      if (e.type() == type && (!best || std::make_pair(e.position->distance_to(def.human), e.id) <
                                            std::make_pair(best->position->distance_to(def.human), best->id)))
        best = &e;
    return best->id;
  };
  auto served = [](const std::string& id) { return GoalAtom{"served", {id}}; };
  auto at = [](const std::string& id, const std::string& place) { return GoalAtom{"at", {id, place}}; };
  if (kind == DomainKind::Coffee) {
    // The creamer goes back once it has been used.
    inst.planning_goal = {served("coffee"), served("creamer"), served(nearest("plastic cup")), at("creamer", "table")};
    if (level == 1) {
      inst.planning_goal.push_back(served(nearest("stir stick")));
      inst.planning_goal.push_back(served(nearest("napkin")));
      inst.planning_goal.push_back(at("coffee", "table"));
    }
  } else {
    inst.planning_goal = {served("cereal_box"), served("milk"), served("bowl_1"), served(nearest("spoon")),
                          at("cereal_box", "cabinet"), at("milk", "fridge")};
    if (level == 1) inst.planning_goal.push_back(served("napkin"));
  }
  return inst;
}

}  // namespace

const std::vector<DistractorTemplate>& kitchenware_pool() {
  static const std::vector<DistractorTemplate> pool = [] {
    const std::vector<DistractorTemplate> base = {
        {"saucepan", "cookware", 0.30},        {"frying pan", "cookware", 0.35},
        {"stock pot", "cookware", 0.25},       {"wok", "cookware", 0.20},
        {"dutch oven", "cookware", 0.20},      {"skillet", "cookware", 0.30},
        {"steamer basket", "cookware", 0.15},  {"roasting pan", "cookware", 0.15},
        {"grill pan", "cookware", 0.20},       {"pressure cooker", "cookware", 0.25},
        {"baking sheet", "bakeware", 0.30},    {"muffin tin", "bakeware", 0.20},
        {"loaf pan", "bakeware", 0.20},        {"cake pan", "bakeware", 0.25},
        {"pie dish", "bakeware", 0.20},        {"cooling rack", "bakeware", 0.15},
        {"rolling pin", "bakeware", 0.25},     {"pastry brush", "bakeware", 0.10},
        {"cookie cutter", "bakeware", 0.10},   {"springform pan", "bakeware", 0.10},
        {"cutting board", "prep_tools", 0.40}, {"chef knife", "prep_tools", 0.45},
        {"paring knife", "prep_tools", 0.20},  {"vegetable peeler", "prep_tools", 0.15},
        {"grater", "prep_tools", 0.15},        {"colander", "prep_tools", 0.20},
        {"mixing bowl", "prep_tools", 0.35},   {"measuring cup", "prep_tools", 0.25},
        {"measuring spoons", "prep_tools", 0.20}, {"whisk", "prep_tools", 0.25},
        {"spatula", "prep_tools", 0.30},       {"ladle", "prep_tools", 0.15},
        {"tongs", "prep_tools", 0.20},         {"can opener", "prep_tools", 0.10},
        {"garlic press", "prep_tools", 0.10},  {"potato masher", "prep_tools", 0.10},
        {"salad spinner", "prep_tools", 0.10}, {"kitchen scale", "prep_tools", 0.15},
        {"food container", "storage_ware", 0.30}, {"zip bag", "storage_ware", 0.20},
        {"plastic wrap", "storage_ware", 0.25}, {"aluminum foil", "storage_ware", 0.25},
        {"spice jar", "storage_ware", 0.15},   {"bread box", "storage_ware", 0.10},
        {"cookie jar", "storage_ware", 0.20},  {"dish soap", "cleaning", 0.40},
        {"sponge", "cleaning", 0.35},          {"scrub brush", "cleaning", 0.20},
        {"dish rack", "cleaning", 0.20},       {"trash bin", "cleaning", 0.30},
        {"recycling bin", "cleaning", 0.20},   {"serving platter", "serveware", 0.30},
        {"serving bowl", "serveware", 0.35},   {"gravy boat", "serveware", 0.10},
        {"butter dish", "serveware", 0.20},    {"cake stand", "serveware", 0.15},
        {"cheese board", "serveware", 0.15},   {"bread basket", "serveware", 0.25},
        {"water pitcher", "serveware", 0.40},  {"toaster oven", "small_appliances", 0.40},
        {"blender", "small_appliances", 0.45}, {"stand mixer", "small_appliances", 0.30},
        {"food processor", "small_appliances", 0.30}, {"rice cooker", "small_appliances", 0.35},
        {"slow cooker", "small_appliances", 0.25}, {"waffle iron", "small_appliances", 0.20},
        {"microwave", "small_appliances", 0.60}, {"oven mitt", "linens", 0.30},
        {"pot holder", "linens", 0.25},        {"apron", "linens", 0.20},
        {"dish towel", "linens", 0.40},        {"tablecloth", "linens", 0.15},
    };
    std::vector<DistractorTemplate> out = base;
    for (const char* prefix : {"large ", "small "})
      for (const auto& t : base) {
        if (out.size() == 200) break;
        out.push_back({prefix + t.name, t.class_id, t.p_high});
      }
    return out;
  }();
  return pool;
}

ProblemInstance gen_coffee(Difficulty difficulty, std::uint64_t seed) {
  return build(DomainKind::Coffee, difficulty, seed, {});
}

ProblemInstance gen_cereal(Difficulty difficulty, std::uint64_t seed) {
  return build(DomainKind::Cereal, difficulty, seed, {});
}

ProblemInstance generate(DomainKind domain, Difficulty difficulty, std::uint64_t seed) {
  return domain == DomainKind::Coffee ? gen_coffee(difficulty, seed) : gen_cereal(difficulty, seed);
}

ProblemInstance coffee_reference_instance() {
  return build(DomainKind::Coffee, Difficulty::Simple, 0, {false, false, false});
}

std::vector<Preference> coffee_demo_preferences(const std::string& human_id) {
  return {
      {human_id, "whole milk", 1.0}, {human_id, "stir stick", 1.0},   {human_id, "creamer", 0.0},
      {human_id, "reduced milk", 0.0}, {human_id, "plastic cup", 0.0}, {human_id, "paper cup", 0.0},
      {human_id, "napkin", 0.0},
  };
}

std::map<ElementId, double> oracle_scores(const ProblemInstance& instance) {
  auto scene = std::make_shared<const SceneRepresentation>(instance.scene);
  TableProvider provider(scene, instance.oracle_table);
  CueSet cues;
  for (const auto& c : instance.cues) cues.add(c);
  const auto dist = provider.task_distribution(instance.objective, cues);
  if (!dist) throw Error(ErrorKind::InsufficientResult, "no task distribution for declared cues");
  std::map<ElementId, double> out;
  for (const auto& cls : instance.scene.classes()) {
    double r = 0.0;
    for (const auto& t : instance.tasks)
      if (auto it = dist->find(t.id); it != dist->end())
        r += *provider.class_given_task(cls, t, instance.objective, {}) * it->second;
    for (const auto& id : cls.member_ids) {
      const auto terms = provider.element_terms(instance.scene.element(id), instance.objective);
      out[id] = r * terms.p_high.value_or(0.0) * terms.p_elem_given_high.value_or(0.0);
    }
  }
  return out;
}

namespace {

json goal_to_json(const std::vector<GoalAtom>& goal) {
  json out = json::array();
  for (const auto& g : goal) out.push_back({{"predicate", g.predicate}, {"args", g.args}});
  return out;
}

}  // namespace

json instance_to_json(const ProblemInstance& instance) {
  json tasks = json::array();
  for (const auto& t : instance.tasks) tasks.push_back({{"id", t.id}, {"description", t.description}});
  const auto& p = instance.human_position;
  return {
      {"case_id", instance.case_id()},
      {"domain", to_string(instance.domain)},
      {"difficulty", to_string(instance.difficulty)},
      {"seed", instance.seed},
      {"objective", {{"id", instance.objective.id}, {"text", instance.objective.text}}},
      {"tasks", tasks},
      {"cues", instance.cues},
      {"ground_truth_relevant", instance.ground_truth_relevant},
      {"borderline", instance.borderline ? json(*instance.borderline) : json(nullptr)},
      {"human_position", {p.x, p.y, p.z}},
      {"goal", goal_to_json(instance.planning_goal)},
  };
}

void write_instance_bundle(const ProblemInstance& instance, const std::string& dir) {
  std::filesystem::create_directories(dir);
  save_scene(instance.scene, dir + "/scene.json");
  save_table(instance.oracle_table, dir + "/table.json");
  auto write = [&](const std::string& name, const json& doc) {
    std::ofstream out(dir + "/" + name);
    if (!out) throw std::runtime_error("cannot write " + dir + "/" + name);
    out << doc.dump(2) << '\n';
  };
  write("goal.json", goal_to_json(instance.planning_goal));
  write("instance.json", instance_to_json(instance));
}

}  // namespace relevance
