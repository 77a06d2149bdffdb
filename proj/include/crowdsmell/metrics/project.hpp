#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "crowdsmell/java/ast.hpp"
#include "crowdsmell/metrics/entity.hpp"

namespace crowdsmell::metrics {

struct Diagnostic {
  std::string file;
  int line = 0;
  std::string message;
};

enum class MethodRole { Regular, Accessor, Mutator };

/// Per-method facts gathered once by the semantic pass; metric vectors are
/// assembled from these.
struct MethodFacts {
  int loc = 0;
  int cyclo = 0;
  int max_nesting = 0;
  int local_vars = 0;
  int local_accesses = 0;    // ATLD
  int foreign_accesses = 0;  // ATFD
  int unresolved_receivers = 0;
  std::set<int> data_providers;          // classes behind foreign_accesses
  std::set<int> foreign_methods;         // CINT
  std::set<int> foreign_namm_methods;    // CFNAMM
  std::set<int> local_namm_methods;      // CLNAMM
  std::set<std::string> fanout_types;
  std::set<int> coupled_classes;         // CBO_method
  std::set<std::string> called_keys;     // RFC
  std::set<std::string> accessed_variables;
  std::set<std::string> own_fields_used; // fields declared in the measured class
  std::set<int> callees;
  std::vector<int> chain_lengths;        // one per message chain statement
};

struct ClassInfo {
  int index = -1;
  std::string package;
  std::string qualified_name;
  const java::TypeDecl* decl = nullptr;
  const java::CompilationUnit* unit = nullptr;
  int outer = -1;
  int super = -1;                  // resolved project superclass
  std::vector<int> interfaces;     // resolved project interfaces
  std::vector<int> methods;        // indices into ProjectModel::methods()
  std::vector<int> children;       // direct project subclasses

  [[nodiscard]] bool is_interface() const {
    return decl->kind == java::TypeKind::Interface || decl->kind == java::TypeKind::Annotation;
  }
};

struct MethodInfo {
  int index = -1;
  int class_index = -1;
  const java::MethodDecl* decl = nullptr;
  std::string signature;
  MethodRole role = MethodRole::Regular;
  MethodFacts facts;
  std::set<int> callers;

  [[nodiscard]] bool has_body() const { return decl->body != nullptr; }
  [[nodiscard]] bool is_namm() const { return role == MethodRole::Regular; }
};

/// Parsed and resolved view of a Java source tree. Immutable once built;
/// all accessors are safe to call concurrently.
class ProjectModel {
 public:
  /// Parses every .java file under root. Files that fail to parse become
  /// diagnostics. Throws EmptyProject when no .java file exists, IoError
  /// when root is not a readable directory.
  static ProjectModel parse_project(const std::filesystem::path& root, std::string project_name = {});

  /// In-memory variant: (path, source) pairs.
  static ProjectModel from_sources(const std::vector<std::pair<std::string, std::string>>& files,
                                   std::string project_name);

  ProjectModel(ProjectModel&&) noexcept;
  ProjectModel& operator=(ProjectModel&&) noexcept;
  ~ProjectModel();

  [[nodiscard]] const std::string& project() const { return project_; }
  [[nodiscard]] const std::vector<ClassInfo>& classes() const { return classes_; }
  [[nodiscard]] const std::vector<MethodInfo>& methods() const { return methods_; }
  [[nodiscard]] const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }
  [[nodiscard]] std::size_t file_count() const { return units_.size(); }
  [[nodiscard]] const std::vector<std::unique_ptr<java::CompilationUnit>>& units() const { return units_; }

  [[nodiscard]] CodeEntityId class_id(int class_index) const;
  [[nodiscard]] CodeEntityId method_id(int method_index) const;
  [[nodiscard]] const ClassInfo* find_class(const CodeEntityId& id) const;
  [[nodiscard]] const MethodInfo* find_method(const CodeEntityId& id) const;

  /// Unique project class with this simple name, or -1.
  [[nodiscard]] int class_by_simple_name(const std::string& name) const;
  /// True when candidate is cls itself or one of its project superclasses.
  [[nodiscard]] bool is_self_or_ancestor(int cls, int candidate) const;
  /// Source text of lines [first, last] (1-based, inclusive).
  [[nodiscard]] std::string source_excerpt(const java::CompilationUnit& unit, int first, int last) const;

  [[nodiscard]] int total_unresolved_receivers() const;

 private:
  ProjectModel() = default;
  void build(std::vector<std::pair<std::string, std::string>> files);
  void resolve_hierarchy();
  void classify_methods();
  void analyze_bodies();

  friend class BodyAnalyzer;

  std::string project_;
  std::vector<std::unique_ptr<java::CompilationUnit>> units_;
  std::vector<ClassInfo> classes_;
  std::vector<MethodInfo> methods_;
  std::vector<Diagnostic> diagnostics_;
  std::map<std::string, std::vector<int>> by_simple_name_;
};

}  // namespace crowdsmell::metrics
