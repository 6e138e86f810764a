#include "dlotrace/scene.hpp"

#include <json.hpp>

#include <fstream>

namespace dlo {

namespace {

using Json = nlohmann::ordered_json;

Json points_to_json(const std::vector<Vec2>& pts) {
  Json arr = Json::array();
  for (const Vec2& p : pts) arr.push_back({p.x(), p.y()});
  return arr;
}

std::vector<Vec2> points_from_json(const Json& arr) {
  std::vector<Vec2> pts;
  pts.reserve(arr.size());
  for (const auto& p : arr) pts.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  return pts;
}

}  // namespace

std::string scene_to_json(const Scene& scene) {
  Json j;
  j["canvas"] = {{"width", scene.width}, {"height", scene.height}};
  j["template"] = scene.template_name;
  j["knotted"] = scene.knotted;
  j["first_knot_crossing"] = scene.first_knot_crossing;
  Json cables = Json::array();
  for (const CablePath& c : scene.cables) {
    Json jc;
    jc["id"] = c.id;
    jc["thickness"] = c.thickness;
    jc["points"] = points_to_json(c.points);
    jc["control_points"] = points_to_json(c.control_points);
    cables.push_back(std::move(jc));
  }
  j["cables"] = std::move(cables);
  Json crossings = Json::array();
  for (const CrossingGT& x : scene.crossings) {
    Json jx;
    jx["position"] = {x.position.x(), x.position.y()};
    jx["strand_a"] = {{"cable", x.strand_a.cable}, {"index", x.strand_a.index}};
    jx["strand_b"] = {{"cable", x.strand_b.cable}, {"index", x.strand_b.index}};
    jx["over"] = x.over;
    crossings.push_back(std::move(jx));
  }
  j["crossings"] = std::move(crossings);
  Json endpoints = Json::array();
  for (const auto& ep : scene.endpoints)
    endpoints.push_back({{ep[0].x(), ep[0].y()}, {ep[1].x(), ep[1].y()}});
  j["endpoints"] = std::move(endpoints);
  Json code = Json::array();
  for (const CodeEntry& e : scene.canonical_code)
    code.push_back({{"id", e.id}, {"sign", std::string(1, sign_char(e.sign))}});
  j["canonical_code"] = std::move(code);
  return j.dump(2) + "\n";
}

Scene scene_from_json(const std::string& text) {
  const Json j = Json::parse(text);
  Scene scene;
  scene.width = j.at("canvas").at("width").get<int>();
  scene.height = j.at("canvas").at("height").get<int>();
  scene.template_name = j.value("template", std::string{});
  scene.knotted = j.value("knotted", false);
  scene.first_knot_crossing = j.value("first_knot_crossing", -1);
  for (const auto& jc : j.at("cables")) {
    CablePath c;
    c.id = jc.at("id").get<int>();
    c.thickness = jc.at("thickness").get<double>();
    c.points = points_from_json(jc.at("points"));
    if (jc.contains("control_points")) c.control_points = points_from_json(jc.at("control_points"));
    scene.cables.push_back(std::move(c));
  }
  for (const auto& jx : j.at("crossings")) {
    CrossingGT x;
    x.position = Vec2(jx.at("position").at(0).get<double>(), jx.at("position").at(1).get<double>());
    x.strand_a = {jx.at("strand_a").at("cable").get<int>(), jx.at("strand_a").at("index").get<int>()};
    x.strand_b = {jx.at("strand_b").at("cable").get<int>(), jx.at("strand_b").at("index").get<int>()};
    x.over = jx.at("over").get<int>();
    scene.crossings.push_back(x);
  }
  for (const auto& je : j.at("endpoints")) {
    scene.endpoints.push_back({Vec2(je.at(0).at(0).get<double>(), je.at(0).at(1).get<double>()),
                               Vec2(je.at(1).at(0).get<double>(), je.at(1).at(1).get<double>())});
  }
  if (j.contains("canonical_code")) {
    for (const auto& je : j.at("canonical_code")) {
      CodeEntry e;
      e.id = je.at("id").get<int>();
      e.sign = je.at("sign").get<std::string>() == "O" ? Sign::over : Sign::under;
      scene.canonical_code.push_back(e);
    }
  }
  return scene;
}

void save_scene(const Scene& scene, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << scene_to_json(scene);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Scene load_scene(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return scene_from_json(text);
}

}  // namespace dlo
