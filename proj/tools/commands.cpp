#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <memory>
#include <optional>

#include "artic/annotation.hpp"
#include "artic/error.hpp"
#include "artic/eval.hpp"
#include "artic/fixture.hpp"
#include "artic/geometry.hpp"
#include "artic/kinematics.hpp"
#include "artic/stats.hpp"
#include "artic/suggest.hpp"
#include "artic/text_format.hpp"
#include "artic/usd.hpp"
#include "artic/validation.hpp"

namespace artic::cli {

namespace fs = std::filesystem;

namespace {

// --- shared loaders ----------------------------------------------------------

TriMesh load_mesh_file(const fs::path& path) {
  try {
    return load_ply(read_file(path));
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

SceneAnnotation load_annotation_file(const fs::path& path, std::optional<std::size_t> faces) {
  try {
    return load_annotation(read_file(path), faces);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

UsdStage load_stage_file(const fs::path& path) {
  try {
    return parse_usda(read_file(path));
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

MassTable mass_table_from(const std::string& path) {
  return path.empty() ? default_mass_table() : load_mass_table(read_file(path));
}

std::vector<PlacementRule> rules_from(const std::string& path) {
  return path.empty() ? default_placement_rules() : parse_placement_rules(read_file(path));
}

bool is_usda(const fs::path& path) { return path.extension() == ".usda"; }

// --- report serialization ------------------------------------------------------

json violation_json(const Violation& v) {
  return {{"kind", std::string(to_string(v.kind))},
          {"object", v.object_id},
          {"parts", v.part_ids},
          {"message", v.message}};
}

json validation_json(const ValidationReport& report) {
  json j;
  j["violations"] = json::array();
  for (const Violation& v : report.violations) j["violations"].push_back(violation_json(v));
  j["depth"] = report.depth;
  j["clean"] = report.clean();
  return j;
}

json stats_json(const StatsReport& s) {
  json bins = json::object();
  for (const auto& [bin, count] : s.face_count_bins)
    bins["[" + std::to_string(1ULL << bin) + ", " + std::to_string(1ULL << (bin + 1)) + ")"] = count;
  return {{"objects", s.objects},
          {"parts", s.parts},
          {"connectivity_graphs", s.connectivity_graphs},
          {"movable", s.movable},
          {"interactable", s.interactable},
          {"fixed", s.fixed},
          {"articulations", s.articulations},
          {"translations", s.translations},
          {"fixtures", s.fixtures},
          {"average_depth", s.average_depth},
          {"movable_fraction", s.movable_fraction},
          {"interactable_fraction", s.interactable_fraction},
          {"translation_fraction", s.translation_fraction},
          {"object_labels", s.object_labels},
          {"part_labels", s.part_labels},
          {"face_count_bins", bins},
          {"mesh_faces", s.mesh_faces},
          {"unannotated_faces", s.unannotated_faces}};
}

// Fills in masses the annotation leaves open from the class table.
void estimate_masses(const TriMesh& mesh, SceneAnnotation& scene, const MassTable& table,
                     const CommonOptions& common) {
  for (ObjectInstance& object : scene.objects) {
    if (object.mass || kStructuralLabels.contains(object.label)) continue;  // static scene shell
    const std::vector<int> faces = object.face_indices();
    if (faces.empty()) continue;
    if (!table.contains(object.label)) {
      if (common.strict) throw Error("no mass class for label '" + object.label + "' (object " + object.id + ")");
      log_warning("no mass class for label '" + object.label + "'; object " + object.id + " left without mass");
      continue;
    }
    const std::vector<Vec3> points = face_vertices(mesh, faces);
    const double volume = compute_aabb(points).volume();
    if (!(volume > 0.0)) {
      log_warning("object " + object.id + " has a flat bounding box; mass left unset");
      continue;
    }
    object.mass = estimate_mass(object.label, volume, table);
  }
}

// Parses "path=value" assignments for animate.
std::pair<std::string, double> parse_assignment(const std::string& text) {
  const std::size_t eq = text.rfind('=');
  double value = 0.0;
  if (eq == std::string::npos || eq == 0 || !parse_real(std::string_view(text).substr(eq + 1), value))
    throw Error("expected JOINT=VALUE, got '" + text + "'");
  return {text.substr(0, eq), value};
}

TriMesh merge_meshes(const std::map<std::string, TriMesh>& meshes) {
  TriMesh out;
  for (const auto& [path, mesh] : meshes) {
    const int base = static_cast<int>(out.vertices.size());
    out.vertices.insert(out.vertices.end(), mesh.vertices.begin(), mesh.vertices.end());
    for (const Face& f : mesh.faces) out.faces.push_back({f[0] + base, f[1] + base, f[2] + base});
  }
  return out;
}

// --- subcommands ---------------------------------------------------------------

void add_convert(CLI::App& app, const CommonOptions& common, int& exit_code) {
  struct Options {
    std::string mesh, annotation, out, mass_table;
  };
  auto opt = std::make_shared<Options>();
  CLI::App* cmd = app.add_subcommand("convert", "Assemble a scene mesh and its annotation into a USDA stage");
  cmd->add_option("--mesh", opt->mesh, "Scene mesh (PLY)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--annotation", opt->annotation, "Annotation sidecar (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("-o,--out", opt->out, "Output stage (.usda)")->required();
  cmd->add_option("--mass-table", opt->mass_table, "Class mass table (JSON); defaults to the built-in table")
      ->check(CLI::ExistingFile);
  cmd->callback([opt, &common, &exit_code] {
    const TriMesh mesh = load_mesh_file(opt->mesh);
    SceneAnnotation scene = load_annotation_file(opt->annotation, mesh.faces.size());
    estimate_masses(mesh, scene, mass_table_from(opt->mass_table), common);
    const UsdStage stage = assemble_stage(mesh, scene);
    write_file(opt->out, emit_usda(stage));
    log_info(common, "wrote " + opt->out + " (" + std::to_string(stage_joints(stage).size()) + " joints)");
    exit_code = 0;
  });
}

void add_validate(CLI::App& app, const CommonOptions& common, int& exit_code) {
  struct Options {
    std::vector<std::string> inputs;
    std::string mesh, out;
  };
  auto opt = std::make_shared<Options>();
  CLI::App* cmd = app.add_subcommand(
      "validate", "Check annotations (.json) for hierarchy faults, or stages (.usda) for structural errors");
  cmd->add_option("inputs", opt->inputs, "Annotation or stage files")->required()->check(CLI::ExistingFile);
  cmd->add_option("--mesh", opt->mesh, "Scene mesh for face-range checks (single input only)")
      ->check(CLI::ExistingFile);
  cmd->add_option("-o,--out", opt->out, "Report path (default: standard output)");
  cmd->callback([opt, &common, &exit_code] {
    if (!opt->mesh.empty() && opt->inputs.size() != 1) throw Error("--mesh needs exactly one input");
    std::optional<std::size_t> faces;
    if (!opt->mesh.empty()) faces = load_mesh_file(opt->mesh).faces.size();

    struct Outcome {
      json report;
      bool hard = false, soft = false;
    };
    std::vector<Outcome> outcomes(opt->inputs.size());
    parallel_for(opt->inputs.size(), common.jobs, [&](std::size_t i) {
      const fs::path path = opt->inputs[i];
      Outcome& o = outcomes[i];
      if (is_usda(path)) {
        // parse_usda runs every stage check and reports the first failure by position.
        try {
          const UsdStage stage = parse_usda(read_file(path));
          o.report = {{"errors", json::array()}, {"joints", stage_joints(stage).size()}, {"clean", true}};
        } catch (const Error& e) {
          o.report = {{"errors", json::array({e.what()})}, {"joints", 0}, {"clean", false}};
          o.hard = true;
        }
        return;
      }
      const SceneAnnotation scene = parse_annotation(read_file(path));
      const ValidationReport report = validate_connectivity(scene);
      o.report = validation_json(report);
      o.hard = report.has_hard_violations();
      o.soft = !report.clean();
      o.report["errors"] = json::array();
      if (!o.hard) {
        try {
          check_annotation(scene, faces);
        } catch (const ValidationError& e) {
          if (!report.clean() && std::string_view(e.what()).find("bad_interactable") != std::string_view::npos) return;
          o.report["errors"].push_back(e.what());
          o.report["clean"] = false;
          o.hard = true;
        }
      }
    });

    bool failed = false;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      if (outcomes[i].hard || (common.strict && outcomes[i].soft)) {
        failed = true;
        log_error(opt->inputs[i] + ": validation failed");
      } else if (outcomes[i].soft) {
        log_warning(opt->inputs[i] + ": validation warnings");
      }
    }
    if (opt->inputs.size() == 1) {
      emit_json(outcomes[0].report, opt->out);
    } else {
      json all = json::object();
      for (std::size_t i = 0; i < outcomes.size(); ++i) all[opt->inputs[i]] = outcomes[i].report;
      emit_json(all, opt->out);
    }
    exit_code = failed ? 1 : 0;
  });
}

void add_suggest(CLI::App& app, const CommonOptions& common, int& exit_code) {
  struct Options {
    std::string mesh, annotation, out;
    double threshold = 0.05;
  };
  auto opt = std::make_shared<Options>();
  CLI::App* cmd = app.add_subcommand("suggest", "Propose hinge and slide axes for movable parts, and fixtures");
  cmd->add_option("--mesh", opt->mesh, "Scene mesh (PLY)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--annotation", opt->annotation, "Annotation sidecar (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--fixture-threshold", opt->threshold, "Maximum box gap for fixture proposals (m)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("-o,--out", opt->out, "Output path (default: standard output)");
  cmd->callback([opt, &common, &exit_code] {
    const TriMesh mesh = load_mesh_file(opt->mesh);
    const SceneAnnotation scene = load_annotation_file(opt->annotation, mesh.faces.size());
    json parts = json::object();
    for (const ObjectInstance& object : scene.objects) {
      for (const PartSegment& part : object.parts) {
        if (part.role != PartRole::kMovable || part.face_indices.empty()) continue;
        // The base is the parent part, or the rest of the object for a root part.
        std::vector<int> base;
        if (part.parent_part) {
          base = object.find_part(*part.parent_part)->face_indices;
        } else {
          for (const PartSegment& other : object.parts)
            if (other.id != part.id) base.insert(base.end(), other.face_indices.begin(), other.face_indices.end());
          std::sort(base.begin(), base.end());
        }
        json entry;
        entry["object"] = object.id;
        entry["annotated_type"] = std::string(to_string(part.articulation->type));
        if (!base.empty()) {
          const HingeSuggestion h = suggest_hinge_axis(mesh, part.face_indices, base);
          entry["hinge"] = {{"axis", vec3_json(h.axis)}, {"origin", vec3_json(h.origin)},
                            {"low_confidence", h.low_confidence}};
        } else {
          entry["hinge"] = nullptr;
        }
        try {
          entry["slide_axis"] = vec3_json(suggest_slide_axis(mesh, part.face_indices));
        } catch (const Error& e) {
          entry["slide_axis"] = nullptr;
          log_warning(part.id + ": " + e.what());
        }
        parts[part.id] = std::move(entry);
      }
    }
    json fixtures = json::array();
    for (const FixtureProposal& p : propose_fixtures(mesh, scene, kDefaultFixtureLabels, opt->threshold))
      fixtures.push_back({{"id", p.fixture.id},
                          {"attached_to", p.fixture.attached_to},
                          {"attachment_point", vec3_json(p.fixture.attachment_point)},
                          {"gap", p.gap}});
    emit_json({{"parts", parts}, {"fixtures", fixtures}}, opt->out);
    log_info(common, std::to_string(parts.size()) + " movable parts, " + std::to_string(fixtures.size()) +
                         " fixture proposals");
    exit_code = 0;
  });
}

void add_stats(CLI::App& app, const CommonOptions& common, int& exit_code) {
  struct Options {
    std::vector<std::string> inputs;
    std::string mesh, out;
  };
  auto opt = std::make_shared<Options>();
  CLI::App* cmd = app.add_subcommand("stats", "Annotation statistics per scene");
  cmd->add_option("inputs", opt->inputs, "Annotation files")->required()->check(CLI::ExistingFile);
  cmd->add_option("--mesh", opt->mesh, "Scene mesh for face-level statistics (single input only)")
      ->check(CLI::ExistingFile);
  cmd->add_option("-o,--out", opt->out, "Output path (default: standard output)");
  cmd->callback([opt, &common, &exit_code] {
    if (!opt->mesh.empty() && opt->inputs.size() != 1) throw Error("--mesh needs exactly one input");
    std::optional<TriMesh> mesh;
    if (!opt->mesh.empty()) mesh = load_mesh_file(opt->mesh);
    std::vector<json> reports(opt->inputs.size());
    parallel_for(opt->inputs.size(), common.jobs, [&](std::size_t i) {
      const SceneAnnotation scene =
          load_annotation_file(opt->inputs[i], mesh ? std::optional(mesh->faces.size()) : std::nullopt);
      reports[i] = stats_json(scene_stats(scene, mesh ? &*mesh : nullptr));
    });
    if (reports.size() == 1) {
      emit_json(reports[0], opt->out);
    } else {
      json all = json::object();
      for (std::size_t i = 0; i < reports.size(); ++i) all[opt->inputs[i]] = reports[i];
      emit_json(all, opt->out);
    }
    exit_code = 0;
  });
}

void add_animate(CLI::App& app, const CommonOptions& common, int& exit_code) {
  struct Options {
    std::string stage, state, out, report;
    std::vector<std::string> set;
    std::optional<double> open;
  };
  auto opt = std::make_shared<Options>();
  CLI::App* cmd = app.add_subcommand("animate", "Pose a stage's joints and write the posed geometry");
  cmd->add_option("--stage", opt->stage, "Input stage (.usda)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--state", opt->state, "Joint state JSON: {\"/joint/path\": value, ...}")
      ->check(CLI::ExistingFile);
  cmd->add_option("--set", opt->set, "JOINT=VALUE (degrees or meters); repeatable");
  cmd->add_option("--open", opt->open, "Set every joint to lower + FRACTION * (upper - lower)")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("-o,--out", opt->out, "Posed mesh (PLY)")->required();
  cmd->add_option("--report", opt->report, "Report path (default: standard output)");
  cmd->callback([opt, &common, &exit_code] {
    const UsdStage stage = load_stage_file(opt->stage);
    const auto joints = stage_joints(stage);
    JointState state;
    if (opt->open)
      for (const auto& [path, joint] : joints)
        if (joint.kind != JointKind::kFixed) state[path] = *joint.lower + *opt->open * (*joint.upper - *joint.lower);
    if (!opt->state.empty()) {
      const json doc = json::parse(read_file(opt->state));
      if (!doc.is_object()) throw Error(opt->state + ": expected an object of joint values");
      for (const auto& [path, value] : doc.items()) {
        if (!value.is_number()) throw Error(opt->state + ": value for '" + path + "' is not a number");
        state[path] = value.get<double>();
      }
    }
    for (const std::string& s : opt->set) {
      const auto [path, value] = parse_assignment(s);
      state[path] = value;
    }
    if (common.strict) {
      for (const auto& [path, value] : state)
        for (const auto& [jpath, joint] : joints)
          if (jpath == path && joint.kind != JointKind::kFixed)
            check_range(joint_articulation(joint), value, RangeMode::kStrict);
    }
    const PosedScene posed = pose_scene(stage, state);
    for (const ClampEvent& c : posed.clamps)
      log_warning(c.joint + ": " + format_real(c.requested) + " clamped to " + format_real(c.applied));
    write_file(opt->out, save_ply(merge_meshes(posed.meshes)));

    json report;
    report["meshes"] = posed.meshes.size();
    report["state"] = json::object();
    for (const auto& [path, value] : state) report["state"][path] = value;
    report["clamps"] = json::array();
    for (const ClampEvent& c : posed.clamps)
      report["clamps"].push_back({{"joint", c.joint}, {"requested", c.requested}, {"applied", c.applied}});
    emit_json(report, opt->report);
    log_info(common, "posed " + std::to_string(state.size()) + " joints into " + opt->out);
    exit_code = 0;
  });
}

void add_edit(CLI::App& app, const CommonOptions& common, int& exit_code) {
  struct Options {
    std::string mesh, annotation, object, label, advisor, rules, out_mesh, out_annotation, out;
    int timeout_ms = 10000;
    InsertionParams params;
  };
  auto opt = std::make_shared<Options>();
  CLI::App* cmd = app.add_subcommand("edit", "Insert an object into a scene on an advised surface");
  cmd->add_option("--mesh", opt->mesh, "Scene mesh (PLY)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--annotation", opt->annotation, "Annotation sidecar (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--object", opt->object, "Object mesh to insert (PLY)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--label", opt->label, "Class label of the inserted object")->required();
  cmd->add_option("--advisor", opt->advisor, "Placement advisor URL (http://host:port/path); default: built-in rules");
  cmd->add_option("--advisor-timeout-ms", opt->timeout_ms, "Advisor timeout")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--rules", opt->rules, "Placement rules (JSON); default: built-in rules")
      ->check(CLI::ExistingFile);
  cmd->add_option("--iterations", opt->params.iterations, "RANSAC iterations")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--inlier-distance", opt->params.inlier_distance, "RANSAC inlier distance (m)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--out-mesh", opt->out_mesh, "Edited scene mesh (PLY)")->required();
  cmd->add_option("--out-annotation", opt->out_annotation, "Edited annotation (JSON)")->required();
  cmd->add_option("-o,--out", opt->out, "Placement report (default: standard output)");
  cmd->callback([opt, &common, &exit_code] {
    const TriMesh mesh = load_mesh_file(opt->mesh);
    const SceneAnnotation scene = load_annotation_file(opt->annotation, mesh.faces.size());
    const TriMesh object = load_mesh_file(opt->object);

    auto rules = std::make_shared<const RuleBasedAdvisor>(rules_from(opt->rules));
    std::shared_ptr<const PlacementAdvisor> advisor = rules;
    if (!opt->advisor.empty()) {
      HttpPlacementAdvisor::Options o;
      o.url = opt->advisor;
      o.timeout = std::chrono::milliseconds(opt->timeout_ms);
      if (!common.strict) o.fallback = rules;  // strict: advisor failures are errors
      advisor = std::make_shared<const HttpPlacementAdvisor>(o);
    }
    std::vector<std::string> labels;
    for (const ObjectInstance& o : scene.objects)
      if (std::find(labels.begin(), labels.end(), o.label) == labels.end()) labels.push_back(o.label);
    const PlacementAdvice advice = advisor->advise(opt->label, labels);
    log_info(common, "placing '" + opt->label + "' on " + std::string(to_string(advice.surface)) + " surface of '" +
                         advice.target_label + "'");

    const InsertionResult r = insert_object(mesh, scene, object, opt->label, advice, common.seed, opt->params);
    write_file(opt->out_mesh, save_ply(r.mesh));
    write_file(opt->out_annotation, save_annotation(r.annotation));
    emit_json({{"object_id", r.object_id},
               {"target_label", advice.target_label},
               {"surface", std::string(to_string(advice.surface))},
               {"plane", {{"normal", vec3_json(r.plane.normal)}, {"offset", r.plane.offset}}},
               {"translation", vec3_json(r.placement.translation)}},
              opt->out);
    exit_code = 0;
  });
}

void add_eval(CLI::App& app, const CommonOptions& common, int& exit_code) {
  struct Options {
    std::string pred, gt, out, integration = "101";
    int buckets = 3;
    bool signed_axis = false;
  };
  auto opt = std::make_shared<Options>();
  CLI::App* cmd = app.add_subcommand("eval", "Score instance predictions against ground truth");
  cmd->add_option("--pred", opt->pred, "Predictions (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--gt", opt->gt, "Ground truth (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--integration", opt->integration, "AP integration: 101 (interpolated points) or area")
      ->check(CLI::IsMember({"101", "area"}))
      ->capture_default_str();
  cmd->add_option("--buckets", opt->buckets, "Size buckets for the breakdown")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_flag("--signed-axis", opt->signed_axis, "Axis gate compares directions, not lines");
  cmd->add_option("-o,--out", opt->out, "Report path (default: standard output)");
  cmd->callback([opt, &common, &exit_code] {
    auto preds = parse_predictions(read_file(opt->pred));
    auto gts = parse_ground_truth(read_file(opt->gt));
    const std::vector<EvalScene> scenes = join_scenes(std::move(preds), std::move(gts));
    EvalConfig config;
    config.integration = opt->integration == "area" ? ApIntegration::kArea : ApIntegration::kPoint101;
    config.size_buckets = opt->buckets;
    config.axis_sign_invariant = !opt->signed_axis;
    const EvalReport report = evaluate(scenes, config);
    if (report.missing_origins > 0) {
      const std::string message =
          std::to_string(report.missing_origins) + " matched rotation predictions lack an origin";
      if (common.strict) throw Error(message);
      log_warning(message);
    }
    const std::string text = report_json(report);
    if (opt->out.empty()) {
      std::fwrite(text.data(), 1, text.size(), stdout);
    } else {
      write_file(opt->out, text);
    }
    log_info(common, "AP " + format_real(report.summary.ap) + ", AP50 " + format_real(report.summary.ap50) +
                         " over " + std::to_string(report.scenes) + " scenes");
    exit_code = 0;
  });
}

void add_gen_fixture(CLI::App& app, const CommonOptions& common, int& exit_code) {
  struct Options {
    std::string out_dir;
    int count = 1;
    CloudSamplingParams sampling;
  };
  auto opt = std::make_shared<Options>();
  CLI::App* cmd = app.add_subcommand(
      "gen-fixture", "Write deterministic synthetic scenes: scene.ply, annotation.json, cloud.ply, gt.json");
  cmd->add_option("-o,--out-dir", opt->out_dir, "Output directory")->required();
  cmd->add_option("--count", opt->count, "Number of scenes (seeds seed..seed+count-1, one subdirectory each)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--density", opt->sampling.density, "Surface samples per m^2 for the evaluation cloud")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--voxel", opt->sampling.voxel, "Evaluation cloud voxel size (m)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->callback([opt, &common, &exit_code] {
    parallel_for(static_cast<std::size_t>(opt->count), common.jobs, [&](std::size_t i) {
      const std::uint64_t seed = common.seed + i;
      fs::path dir = opt->out_dir;
      if (opt->count > 1) dir /= "scene_" + std::to_string(seed);
      const SyntheticScene scene = synthetic_scene(seed);
      const EvaluationCloud cloud = evaluation_cloud(scene.mesh, scene.annotation, seed, opt->sampling);
      write_file(dir / "scene.ply", save_ply(scene.mesh));
      write_file(dir / "annotation.json", save_annotation(scene.annotation));
      write_file(dir / "cloud.ply", save_ply(cloud.cloud));
      write_file(dir / "gt.json", save_ground_truth(scene.annotation.scene_id, cloud.ground_truth));
      log_info(common, "wrote " + dir.string() + " (" + std::to_string(scene.mesh.faces.size()) + " faces, " +
                           std::to_string(cloud.cloud.points.size()) + " points, " +
                           std::to_string(cloud.ground_truth.size()) + " movable parts)");
    });
    exit_code = 0;
  });
}

void add_extract(CLI::App& app, const CommonOptions& common, int& exit_code) {
  struct Options {
    std::string stage, prim, out;
  };
  auto opt = std::make_shared<Options>();
  CLI::App* cmd = app.add_subcommand("extract", "Copy one object's subtree into a stage of its own");
  cmd->add_option("--stage", opt->stage, "Input stage (.usda)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--prim", opt->prim, "Prim path of the object, e.g. /World/cabinet_0")->required();
  cmd->add_option("-o,--out", opt->out, "Output stage (.usda)")->required();
  cmd->callback([opt, &common, &exit_code] {
    const ExtractedObject extracted = extract_object(load_stage_file(opt->stage), opt->prim);
    for (const std::string& w : extracted.warnings) log_warning(w);
    if (common.strict && !extracted.warnings.empty()) throw Error("extraction dropped references");
    write_file(opt->out, emit_usda(extracted.stage));
    log_info(common, "wrote " + opt->out);
    exit_code = 0;
  });
}

}  // namespace

void register_commands(CLI::App& app, const CommonOptions& common, int& exit_code) {
  add_convert(app, common, exit_code);
  add_validate(app, common, exit_code);
  add_suggest(app, common, exit_code);
  add_stats(app, common, exit_code);
  add_animate(app, common, exit_code);
  add_edit(app, common, exit_code);
  add_eval(app, common, exit_code);
  add_gen_fixture(app, common, exit_code);
  add_extract(app, common, exit_code);
}

}  // namespace artic::cli
