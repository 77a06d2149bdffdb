#include "crowdsmell/metrics/project.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "crowdsmell/error.hpp"
#include "crowdsmell/java/parser.hpp"

namespace crowdsmell::metrics {

namespace fs = std::filesystem;
using java::Expr;
using java::ExprKind;
using java::Stmt;
using java::StmtKind;
using java::TypeRef;

std::string CodeEntityId::display() const {
  std::string out = package.empty() ? class_name : package + "." + class_name;
  if (method_signature) out += "#" + *method_signature;
  return out;
}

double MetricVector::at(std::string_view acronym) const {
  auto it = values.find(acronym);
  if (it == values.end()) {
    throw Error(ErrorCode::UnknownEntity, "metric not present: " + std::string(acronym));
  }
  return it->second;
}

ProjectModel::ProjectModel(ProjectModel&&) noexcept = default;
ProjectModel& ProjectModel::operator=(ProjectModel&&) noexcept = default;
ProjectModel::~ProjectModel() = default;

ProjectModel ProjectModel::parse_project(const fs::path& root, std::string project_name) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw Error(ErrorCode::IoError, "not a directory: " + root.string());
  }
  std::vector<fs::path> paths;
  for (auto it = fs::recursive_directory_iterator(root, ec); !ec && it != fs::recursive_directory_iterator();
       it.increment(ec)) {
    if (it->is_regular_file() && it->path().extension() == ".java") paths.push_back(it->path());
  }
  if (ec) throw Error(ErrorCode::IoError, "cannot scan " + root.string() + ": " + ec.message());
  if (paths.empty()) throw Error(ErrorCode::EmptyProject, "no .java files under " + root.string());

  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& p : paths) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read " + p.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    files.emplace_back(fs::relative(p, root).generic_string(), buf.str());
  }
  if (project_name.empty()) {
    fs::path canonical = fs::weakly_canonical(root);
    project_name = canonical.filename().string();
    if (project_name.empty()) project_name = canonical.parent_path().filename().string();
  }
  ProjectModel model;
  model.project_ = std::move(project_name);
  model.build(std::move(files));
  return model;
}

ProjectModel ProjectModel::from_sources(const std::vector<std::pair<std::string, std::string>>& files,
                                        std::string project_name) {
  if (files.empty()) throw Error(ErrorCode::EmptyProject, "no sources");
  ProjectModel model;
  model.project_ = std::move(project_name);
  model.build(files);
  return model;
}

namespace {

struct PendingType {
  std::string package;
  std::string qualified;
  const java::TypeDecl* decl;
  const java::CompilationUnit* unit;
  const java::TypeDecl* outer;
};

void collect_types(const java::TypeDecl& decl, const java::CompilationUnit& unit, const java::TypeDecl* outer,
                   const std::string& prefix, std::vector<PendingType>& out) {
  std::string qualified = prefix.empty() ? decl.name : prefix + "." + decl.name;
  out.push_back(PendingType{unit.package_name, qualified, &decl, &unit, outer});
  for (const auto& nested : decl.nested) collect_types(*nested, unit, &decl, qualified, out);
}

}  // namespace

void ProjectModel::build(std::vector<std::pair<std::string, std::string>> files) {
  // Enumeration order must not leak into results.
  std::sort(files.begin(), files.end());
  for (auto& [path, source] : files) {
    try {
      auto unit = std::make_unique<java::CompilationUnit>(java::parse_compilation_unit(source, path));
      units_.push_back(std::move(unit));
    } catch (const Error& e) {
      diagnostics_.push_back(Diagnostic{path, 0, std::string("parse failed: ") + e.what()});
    }
  }

  std::vector<PendingType> pending;
  for (const auto& unit : units_) {
    for (const auto& type : unit->types) collect_types(*type, *unit, nullptr, "", pending);
  }
  std::stable_sort(pending.begin(), pending.end(), [](const PendingType& a, const PendingType& b) {
    return std::tie(a.package, a.qualified) < std::tie(b.package, b.qualified);
  });
  std::unordered_map<const java::TypeDecl*, int> index_of;
  for (std::size_t i = 0; i < pending.size(); ++i) {
    const auto& p = pending[i];
    if (!classes_.empty() && classes_.back().package == p.package && classes_.back().qualified_name == p.qualified) {
      diagnostics_.push_back(Diagnostic{p.unit->path, p.decl->begin_line,
                                        "duplicate type " + p.qualified + " ignored"});
      continue;
    }
    ClassInfo info;
    info.index = static_cast<int>(classes_.size());
    info.package = p.package;
    info.qualified_name = p.qualified;
    info.decl = p.decl;
    info.unit = p.unit;
    index_of[p.decl] = info.index;
    classes_.push_back(std::move(info));
  }
  for (const auto& p : pending) {
    auto it = index_of.find(p.decl);
    if (it == index_of.end() || !p.outer) continue;
    auto outer = index_of.find(p.outer);
    if (outer != index_of.end()) classes_[it->second].outer = outer->second;
  }
  for (const auto& c : classes_) by_simple_name_[c.decl->name].push_back(c.index);

  for (auto& c : classes_) {
    for (const auto& m : c.decl->methods) {
      MethodInfo info;
      info.index = static_cast<int>(methods_.size());
      info.class_index = c.index;
      info.decl = &m;
      info.signature = m.signature();
      c.methods.push_back(info.index);
      methods_.push_back(std::move(info));
    }
  }

  resolve_hierarchy();
  classify_methods();
  analyze_bodies();
}

int ProjectModel::class_by_simple_name(const std::string& name) const {
  auto it = by_simple_name_.find(name);
  if (it == by_simple_name_.end() || it->second.size() != 1) return -1;
  return it->second.front();
}

bool ProjectModel::is_self_or_ancestor(int cls, int candidate) const {
  for (std::size_t guard = 0; cls >= 0 && guard <= classes_.size(); ++guard) {
    if (cls == candidate) return true;
    cls = classes_[cls].super;
  }
  return false;
}

void ProjectModel::resolve_hierarchy() {
  for (auto& c : classes_) {
    const auto& decl = *c.decl;
    if (decl.kind == java::TypeKind::Interface) {
      for (const auto& ext : decl.extends) {
        int target = class_by_simple_name(ext.base);
        if (target >= 0 && target != c.index) c.interfaces.push_back(target);
      }
      continue;
    }
    if (!decl.extends.empty()) {
      int target = class_by_simple_name(decl.extends.front().base);
      if (target >= 0 && target != c.index && !classes_[target].is_interface()) {
        c.super = target;
      } else {
        diagnostics_.push_back(Diagnostic{c.unit->path, decl.begin_line,
                                          "unresolved superclass " + decl.extends.front().text + " of " +
                                              c.qualified_name + " (DIT counted as 0)"});
      }
    }
    for (const auto& impl : decl.implements) {
      int target = class_by_simple_name(impl.base);
      if (target >= 0) c.interfaces.push_back(target);
    }
  }
  // Break inheritance cycles so every walk terminates.
  for (auto& c : classes_) {
    int slow = c.index;
    std::size_t steps = 0;
    for (int cur = c.super; cur >= 0; cur = classes_[cur].super) {
      if (cur == slow || ++steps > classes_.size()) {
        diagnostics_.push_back(Diagnostic{c.unit->path, c.decl->begin_line,
                                          "inheritance cycle through " + c.qualified_name});
        c.super = -1;
        break;
      }
    }
  }
  for (const auto& c : classes_) {
    if (c.super >= 0) classes_[c.super].children.push_back(c.index);
  }
}

namespace {

struct FieldHit {
  int owner = -1;
  const java::FieldDecl* field = nullptr;
};

}  // namespace

// Semantic pass over one method body. Resolution is heuristic and
// project-local: a receiver resolves only through declared types.
class BodyAnalyzer {
 public:
  BodyAnalyzer(const ProjectModel& model, int own, MethodFacts& facts)
      : model_(model), own_(own), facts_(facts) {}

  struct TypeInfo {
    std::string name;
    int cls = -1;
    int dims = 0;
    bool type_ref = false;
    [[nodiscard]] bool known() const { return !name.empty(); }
  };

  FieldHit find_field(int cls, const std::string& name) const {
    bool first = true;
    for (std::size_t guard = 0; cls >= 0 && guard <= model_.classes_.size(); ++guard) {
      for (const auto& f : model_.classes_[cls].decl->fields) {
        if (f.name == name && (first || !f.mods.is_private)) return FieldHit{cls, &f};
      }
      first = false;
      cls = model_.classes_[cls].super;
    }
    return {};
  }

  int find_method(int cls, const std::string& name, std::size_t argc) const {
    std::vector<int> queue{cls};
    std::set<int> seen;
    for (std::size_t i = 0; i < queue.size(); ++i) {
      int c = queue[i];
      if (c < 0 || !seen.insert(c).second) continue;
      for (int mi : model_.classes_[c].methods) {
        const auto& d = *model_.methods_[mi].decl;
        if (d.is_constructor || d.name != name) continue;
        bool varargs = !d.params.empty() && d.params.back().varargs;
        if (d.params.size() == argc || (varargs && argc + 1 >= d.params.size())) return mi;
      }
      queue.push_back(model_.classes_[c].super);
      for (int iface : model_.classes_[c].interfaces) queue.push_back(iface);
    }
    return -1;
  }

  TypeInfo from_ref(const TypeRef& ref) const {
    TypeInfo t;
    if (ref.empty()) return t;
    t.name = ref.base;
    t.dims = ref.dims;
    if (!ref.primitive && ref.dims == 0) {
      t.cls = model_.class_by_simple_name(ref.base);
      if (t.cls >= 0) t.name = model_.classes_[t.cls].qualified_name;
    }
    if (ref.primitive) t.cls = -1;
    return t;
  }

  TypeInfo class_type(int cls, bool type_ref) const {
    TypeInfo t;
    if (cls < 0) return t;
    t.name = model_.classes_[cls].qualified_name;
    t.cls = cls;
    t.type_ref = type_ref;
    return t;
  }

  void collect_locals(const java::MethodDecl& m) {
    for (const auto& p : m.params) {
      locals_[p.name] = &p.type;
      params_.insert(p.name);
    }
    if (m.body) collect_stmt(*m.body);
  }

  void analyze(const java::MethodDecl& m) {
    collect_locals(m);
    if (!m.body) return;
    facts_.cyclo = 1;
    for (const auto& p : m.params) {
      for (const auto& n : p.type.names) couple(model_.class_by_simple_name(n));
    }
    for (const auto& n : m.return_type.names) couple(model_.class_by_simple_name(n));
    stmt(*m.body, 0);
  }

 private:
  const ProjectModel& model_;
  int own_;
  MethodFacts& facts_;
  std::map<std::string, const TypeRef*> locals_;
  std::set<std::string> params_;
  static inline const TypeRef kNoType{};
  int depth_ = 0;
  int chain_max_ = 0;

  // ---- local declarations --------------------------------------------

  void collect_expr(const Expr& e) {
    if (e.kind == ExprKind::Lambda) {
      for (const auto& p : e.lambda_params) locals_[p] = &kNoType;
      if (e.lambda_body) collect_stmt(*e.lambda_body);
    }
    if (e.target) collect_expr(*e.target);
    for (const auto& a : e.args) {
      if (a) collect_expr(*a);
    }
  }

  void collect_stmt(const Stmt& s) {
    for (const auto& v : s.vars) {
      locals_[v.name] = &v.type;
      if (v.init) collect_expr(*v.init);
    }
    for (const auto& c : s.catches) {
      locals_[c.name] = c.types.empty() ? &kNoType : &c.types.front();
      if (c.block) collect_stmt(*c.block);
    }
    for (const auto* e : {s.expr.get(), s.expr2.get()}) {
      if (e) collect_expr(*e);
    }
    for (const auto& e : s.updates) collect_expr(*e);
    for (const auto& child : s.init) collect_stmt(*child);
    for (const auto& child : s.block) collect_stmt(*child);
    for (const auto* child : {s.then_branch.get(), s.else_branch.get(), s.body.get(), s.finally_block.get()}) {
      if (child) collect_stmt(*child);
    }
    for (const auto& c : s.cases) {
      for (const auto& child : c.body) collect_stmt(*child);
    }
  }

  // ---- bookkeeping -----------------------------------------------------

  void couple(int cls) {
    if (cls >= 0 && cls != own_) facts_.coupled_classes.insert(cls);
  }

  std::string field_key(const FieldHit& hit) const {
    return "f:" + model_.classes_[hit.owner].qualified_name + "." + hit.field->name;
  }

  void field_hit(const FieldHit& hit) {
    facts_.accessed_variables.insert(field_key(hit));
    if (model_.is_self_or_ancestor(own_, hit.owner)) {
      ++facts_.local_accesses;
      if (hit.owner == own_) facts_.own_fields_used.insert(hit.field->name);
    } else {
      ++facts_.foreign_accesses;
      facts_.data_providers.insert(hit.owner);
    }
  }

  std::string method_key(int mi) const {
    const auto& m = model_.methods_[mi];
    return model_.classes_[m.class_index].qualified_name + "#" + m.signature;
  }

  void resolved_call(int mi) {
    const auto& m = model_.methods_[mi];
    facts_.called_keys.insert(method_key(mi));
    facts_.callees.insert(mi);
    if (model_.is_self_or_ancestor(own_, m.class_index)) {
      if (m.is_namm()) {
        facts_.local_namm_methods.insert(mi);
      } else {
        ++facts_.local_accesses;
      }
      return;
    }
    facts_.foreign_methods.insert(mi);
    if (m.is_namm()) {
      facts_.foreign_namm_methods.insert(mi);
    } else {
      ++facts_.foreign_accesses;
      facts_.data_providers.insert(m.class_index);
    }
  }

  void level(int d) { facts_.max_nesting = std::max(facts_.max_nesting, d); }

  template <typename F>
  void with_statement(F&& body) {
    int saved = chain_max_;
    chain_max_ = 0;
    body();
    if (chain_max_ >= 2) facts_.chain_lengths.push_back(chain_max_);
    chain_max_ = saved;
  }

  void opt_expr(const Expr* e) {
    if (e) expr(*e);
  }

  void declare_vars(const std::vector<java::LocalVar>& vars) {
    facts_.local_vars += static_cast<int>(vars.size());
    for (const auto& v : vars) {
      if (v.init) {
        expr(*v.init);
        facts_.accessed_variables.insert("v:" + v.name);
      }
    }
  }

  // ---- statements --------------------------------------------------------

  void stmt(const Stmt& s, int depth) {
    depth_ = depth;
    switch (s.kind) {
      case StmtKind::Block:
        for (const auto& c : s.block) stmt(*c, depth);
        break;
      case StmtKind::LocalVars:
        with_statement([&] { declare_vars(s.vars); });
        break;
      case StmtKind::LocalClass:
      case StmtKind::Break:
      case StmtKind::Continue:
      case StmtKind::Empty:
        break;
      case StmtKind::Expression:
      case StmtKind::Return:
      case StmtKind::Throw:
        with_statement([&] { opt_expr(s.expr.get()); });
        break;
      case StmtKind::Assert:
        with_statement([&] {
          opt_expr(s.expr.get());
          opt_expr(s.expr2.get());
        });
        break;
      case StmtKind::If:
        ++facts_.cyclo;
        level(depth + 1);
        with_statement([&] { opt_expr(s.expr.get()); });
        stmt(*s.then_branch, depth + 1);
        if (s.else_branch) {
          // else-if chains stay at the level of the first if.
          stmt(*s.else_branch, s.else_branch->kind == StmtKind::If ? depth : depth + 1);
        }
        break;
      case StmtKind::For:
        ++facts_.cyclo;
        level(depth + 1);
        with_statement([&] {
          for (const auto& init : s.init) {
            if (init->kind == StmtKind::LocalVars) {
              declare_vars(init->vars);
            } else {
              opt_expr(init->expr.get());
            }
          }
          opt_expr(s.expr.get());
          for (const auto& u : s.updates) expr(*u);
        });
        stmt(*s.body, depth + 1);
        break;
      case StmtKind::ForEach:
        ++facts_.cyclo;
        level(depth + 1);
        facts_.local_vars += static_cast<int>(s.vars.size());
        for (const auto& v : s.vars) facts_.accessed_variables.insert("v:" + v.name);
        with_statement([&] { opt_expr(s.expr2.get()); });
        stmt(*s.body, depth + 1);
        break;
      case StmtKind::While:
      case StmtKind::Do:
        ++facts_.cyclo;
        level(depth + 1);
        with_statement([&] { opt_expr(s.expr.get()); });
        stmt(*s.body, depth + 1);
        break;
      case StmtKind::Switch:
        level(depth + 1);
        with_statement([&] { opt_expr(s.expr.get()); });
        for (const auto& c : s.cases) {
          if (!c.is_default) facts_.cyclo += static_cast<int>(c.labels.size());
          for (const auto& child : c.body) stmt(*child, depth + 1);
        }
        break;
      case StmtKind::Try:
        level(depth + 1);
        with_statement([&] { declare_vars(s.vars); });
        stmt(*s.body, depth + 1);
        for (const auto& c : s.catches) {
          ++facts_.cyclo;
          ++facts_.local_vars;
          stmt(*c.block, depth + 1);
        }
        if (s.finally_block) stmt(*s.finally_block, depth + 1);
        break;
      case StmtKind::Synchronized:
        level(depth + 1);
        with_statement([&] { opt_expr(s.expr.get()); });
        stmt(*s.body, depth + 1);
        break;
      case StmtKind::Labeled:
        stmt(*s.body, depth);
        break;
    }
    depth_ = depth;
  }

  // ---- expressions -------------------------------------------------------

  static int chain_spine(const Expr& e) {
    int calls = 0;
    for (const Expr* cur = &e; cur;) {
      if (cur->kind == ExprKind::MethodCall) {
        ++calls;
      } else if (cur->kind != ExprKind::FieldAccess) {
        break;
      }
      cur = cur->target.get();
    }
    return calls;
  }

  int outer_named(const std::string& name) const {
    for (int c = model_.classes_[own_].outer; c >= 0; c = model_.classes_[c].outer) {
      if (model_.classes_[c].decl->name == name) return c;
    }
    return model_.class_by_simple_name(name);
  }

  TypeInfo infer_name(const std::string& name) const {
    if (auto it = locals_.find(name); it != locals_.end()) return from_ref(*it->second);
    if (FieldHit hit = find_field(own_, name); hit.field) return from_ref(hit.field->type);
    for (int c = model_.classes_[own_].outer; c >= 0; c = model_.classes_[c].outer) {
      if (FieldHit hit = find_field(c, name); hit.field) return from_ref(hit.field->type);
    }
    if (int cls = model_.class_by_simple_name(name); cls >= 0) return class_type(cls, true);
    TypeInfo t;
    if (!name.empty() && std::isupper(static_cast<unsigned char>(name.front()))) {
      t.name = name;
      t.type_ref = true;
    }
    return t;
  }

  TypeInfo infer(const Expr& e) const {
    switch (e.kind) {
      case ExprKind::Name:
        return infer_name(e.name);
      case ExprKind::This:
        return class_type(e.name.empty() ? own_ : outer_named(e.name), false);
      case ExprKind::Super:
        return class_type(model_.classes_[own_].super, false);
      case ExprKind::FieldAccess: {
        TypeInfo t = infer(*e.target);
        if (t.cls >= 0) {
          if (FieldHit hit = find_field(t.cls, e.name); hit.field) return from_ref(hit.field->type);
        }
        if (t.type_ref || !t.known()) {
          if (int cls = model_.class_by_simple_name(e.name); cls >= 0) return class_type(cls, true);
        }
        return {};
      }
      case ExprKind::MethodCall: {
        int mi = resolve_call_target(e);
        if (mi >= 0) {
          const auto& rt = model_.methods_[mi].decl->return_type;
          if (rt.base != "void") return from_ref(rt);
        }
        return {};
      }
      case ExprKind::New:
        return from_ref(e.type);
      case ExprKind::Cast:
        return from_ref(e.type);
      case ExprKind::Literal: {
        TypeInfo t;
        if (!e.name.empty() && e.name.front() == '"') t.name = "String";
        return t;
      }
      case ExprKind::Conditional:
        return infer(*e.args[1]);
      case ExprKind::ArrayAccess: {
        TypeInfo t = infer(*e.target);
        if (t.dims <= 0) return {};
        --t.dims;
        if (t.dims == 0) {
          t.cls = model_.class_by_simple_name(t.name);
          if (t.cls >= 0) t.name = model_.classes_[t.cls].qualified_name;
        }
        return t;
      }
      default:
        return {};
    }
  }

  // Method index the call resolves to, without recording anything.
  int resolve_call_target(const Expr& e) const {
    std::size_t argc = e.args.size();
    if (!e.target) {
      if (e.name == "this" || e.name == "super") return -1;
      int mi = find_method(own_, e.name, argc);
      for (int c = model_.classes_[own_].outer; mi < 0 && c >= 0; c = model_.classes_[c].outer) {
        mi = find_method(c, e.name, argc);
      }
      return mi;
    }
    TypeInfo t = infer(*e.target);
    if (t.cls < 0) return -1;
    return find_method(t.cls, e.name, argc);
  }

  void name_access(const std::string& name) {
    if (locals_.count(name)) {
      facts_.accessed_variables.insert("v:" + name);
      return;
    }
    if (FieldHit hit = find_field(own_, name); hit.field) {
      field_hit(hit);
      return;
    }
    for (int c = model_.classes_[own_].outer; c >= 0; c = model_.classes_[c].outer) {
      if (FieldHit hit = find_field(c, name); hit.field) {
        field_hit(hit);
        return;
      }
    }
  }

  void field_access(const Expr& e) {
    const Expr& target = *e.target;
    if (target.kind == ExprKind::This || target.kind == ExprKind::Super) {
      int cls = target.kind == ExprKind::Super ? model_.classes_[own_].super
                                               : (target.name.empty() ? own_ : outer_named(target.name));
      if (cls >= 0) {
        if (FieldHit hit = find_field(cls, e.name); hit.field) field_hit(hit);
      }
      return;
    }
    expr(target);
    TypeInfo t = infer(target);
    if (t.cls >= 0) {
      if (FieldHit hit = find_field(t.cls, e.name); hit.field) field_hit(hit);
    }
  }

  void receiver_type(const TypeInfo& t) {
    if (!t.known()) return;
    if (t.cls >= 0) {
      if (t.cls == own_) return;
      couple(t.cls);
    }
    if (t.dims == 0) facts_.fanout_types.insert(t.name);
  }

  void call(const Expr& e) {
    if (e.target) expr(*e.target);
    for (const auto& a : e.args) expr(*a);
    chain_max_ = std::max(chain_max_, chain_spine(e));

    const std::size_t argc = e.args.size();
    const std::string suffix = "#" + e.name + "/" + std::to_string(argc);
    if (!e.target) {
      if (e.name == "this" || e.name == "super") return;  // constructor invocation
      if (int mi = find_method(own_, e.name, argc); mi >= 0) {
        resolved_call(mi);
        return;
      }
      for (int c = model_.classes_[own_].outer; c >= 0; c = model_.classes_[c].outer) {
        if (int mi = find_method(c, e.name, argc); mi >= 0) {
          receiver_type(class_type(c, false));
          resolved_call(mi);
          return;
        }
      }
      ++facts_.unresolved_receivers;
      facts_.called_keys.insert("?" + suffix);
      return;
    }
    TypeInfo t = infer(*e.target);
    if (e.target->kind == ExprKind::Super && t.cls < 0) {
      ++facts_.unresolved_receivers;
      facts_.called_keys.insert("?" + suffix);
      return;
    }
    if (!t.known()) {
      ++facts_.unresolved_receivers;
      facts_.called_keys.insert("?" + suffix);
      return;
    }
    receiver_type(t);
    if (t.cls >= 0) {
      if (int mi = find_method(t.cls, e.name, argc); mi >= 0) {
        resolved_call(mi);
        return;
      }
    }
    facts_.called_keys.insert(t.name + suffix);
  }

  void expr(const Expr& e) {
    switch (e.kind) {
      case ExprKind::Literal:
      case ExprKind::ClassLiteral:
      case ExprKind::This:
      case ExprKind::Super:
        return;
      case ExprKind::Name:
        name_access(e.name);
        return;
      case ExprKind::FieldAccess:
        field_access(e);
        return;
      case ExprKind::MethodCall:
        call(e);
        return;
      case ExprKind::New:
        if (e.target) expr(*e.target);
        for (const auto& a : e.args) expr(*a);
        couple(from_ref(e.type).cls);
        return;
      case ExprKind::Binary:
        if (e.name == "&&" || e.name == "||") ++facts_.cyclo;
        break;
      case ExprKind::Conditional:
        ++facts_.cyclo;
        break;
      case ExprKind::Lambda:
        if (e.target) expr(*e.target);
        if (e.lambda_body) {
          int depth = depth_;
          stmt(*e.lambda_body, depth);
          depth_ = depth;
        }
        return;
      default:
        break;
    }
    if (e.target) expr(*e.target);
    for (const auto& a : e.args) {
      if (a) expr(*a);
    }
  }
};

void ProjectModel::classify_methods() {
  for (auto& m : methods_) {
    const auto& d = *m.decl;
    if (d.is_constructor || !d.body || d.body->block.size() != 1) continue;
    BodyAnalyzer probe(*this, m.class_index, m.facts);
    std::set<std::string> params;
    for (const auto& p : d.params) params.insert(p.name);
    auto own_field = [&](const Expr& e) -> bool {
      if (e.kind == ExprKind::Name) {
        return !params.count(e.name) && probe.find_field(m.class_index, e.name).field != nullptr;
      }
      if (e.kind == ExprKind::FieldAccess && e.target->kind == ExprKind::This && e.target->name.empty()) {
        return probe.find_field(m.class_index, e.name).field != nullptr;
      }
      return false;
    };
    const Stmt& only = *d.body->block.front();
    if (only.kind == StmtKind::Return && only.expr && own_field(*only.expr)) {
      m.role = MethodRole::Accessor;
    } else if (only.kind == StmtKind::Expression && only.expr && only.expr->kind == ExprKind::Assign &&
               only.expr->name == "=" && own_field(*only.expr->args[0]) &&
               only.expr->args[1]->kind == ExprKind::Name && params.count(only.expr->args[1]->name)) {
      m.role = MethodRole::Mutator;
    }
  }
}

void ProjectModel::analyze_bodies() {
  for (auto& m : methods_) {
    const auto& cls = classes_[m.class_index];
    BodyAnalyzer analyzer(*this, m.class_index, m.facts);
    analyzer.analyze(*m.decl);
    if (m.decl->body) m.facts.loc = cls.unit->count_code_lines(m.decl->begin_line, m.decl->end_line);
    if (m.facts.unresolved_receivers > 0) {
      diagnostics_.push_back(Diagnostic{cls.unit->path, m.decl->begin_line,
                                        std::to_string(m.facts.unresolved_receivers) +
                                            " unresolved call receiver(s) in " + cls.qualified_name + "#" +
                                            m.signature});
    }
  }
  for (const auto& m : methods_) {
    for (int callee : m.facts.callees) {
      if (callee != m.index) methods_[callee].callers.insert(m.index);
    }
  }
}

CodeEntityId ProjectModel::class_id(int class_index) const {
  const auto& c = classes_.at(class_index);
  return CodeEntityId{project_, c.package, c.qualified_name, std::nullopt};
}

CodeEntityId ProjectModel::method_id(int method_index) const {
  const auto& m = methods_.at(method_index);
  CodeEntityId id = class_id(m.class_index);
  id.method_signature = m.signature;
  return id;
}

const ClassInfo* ProjectModel::find_class(const CodeEntityId& id) const {
  if (!id.project.empty() && id.project != project_) return nullptr;
  for (const auto& c : classes_) {
    if (c.package == id.package && c.qualified_name == id.class_name) return &c;
  }
  return nullptr;
}

const MethodInfo* ProjectModel::find_method(const CodeEntityId& id) const {
  if (!id.method_signature) return nullptr;
  const ClassInfo* cls = find_class(id);
  if (!cls) return nullptr;
  for (int mi : cls->methods) {
    if (methods_[mi].signature == *id.method_signature) return &methods_[mi];
  }
  return nullptr;
}

std::string ProjectModel::source_excerpt(const java::CompilationUnit& unit, int first, int last) const {
  std::string out;
  for (int line = std::max(first, 1); line <= last && line <= static_cast<int>(unit.source_lines.size()); ++line) {
    out += unit.source_lines[line - 1];
    out += '\n';
  }
  return out;
}

int ProjectModel::total_unresolved_receivers() const {
  int total = 0;
  for (const auto& m : methods_) total += m.facts.unresolved_receivers;
  return total;
}

}  // namespace crowdsmell::metrics
