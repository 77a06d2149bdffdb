#include "crowdsmell/metrics/registry.hpp"

#include <array>

namespace crowdsmell::metrics {

namespace {

constexpr Scope C = Scope::Class;
constexpr Scope M = Scope::Method;

constexpr std::array<MetricDescriptor, kMethodMetricCount> kRegistry = {{
    // Class level.
    {"LOC", "Lines of Code", C, "non-blank, non-comment lines from declaration to closing brace"},
    {"LOCNAMM", "Lines of Code Without Accessor or Mutator Methods", C, "LOC minus LOC of accessor/mutator methods"},
    {"NOM", "Number of Methods", C, "declared methods and constructors"},
    {"NOMNAMM", "Number of Not Accessor or Mutator Methods", C, "NOM minus accessors and mutators"},
    {"NOA", "Number of Attributes", C, "declared fields (one per declarator, enum constants included)"},
    {"WMC", "Weighted Methods Count", C, "sum of CYCLO over declared methods"},
    {"WMCNAMM", "Weighted Methods Count of Not Accessor or Mutator Methods", C, "sum of CYCLO over non-accessor/mutator methods"},
    {"AMW", "Average Methods Weight", C, "WMC / NOM, 0 when NOM = 0"},
    {"AMWNAMM", "Average Methods Weight of Not Accessor or Mutator Methods", C, "WMCNAMM / NOMNAMM, 0 when NOMNAMM = 0"},
    {"WOC", "Weight of Class", C, "public functional methods / (public methods + public attributes)"},
    {"TCC", "Tight Class Cohesion", C, "connected pairs / all pairs of non-constructor non-accessor methods with a body; 1 with fewer than 2"},
    {"LCOM", "Lack of Cohesion in Methods", C, "max(0, disjoint pairs - sharing pairs) over methods with a body"},
    {"RFC", "Response for a Class", C, "NOM + distinct non-own methods called"},
    {"CBO", "Coupling Between Objects Classes", C, "distinct project classes via field, parameter, return, instantiation or call"},
    {"NOAM", "Number of Accessor Methods", C, "methods whose body is exactly `return field;`"},
    {"NOPA", "Number of Public Attributes", C, "public fields"},
    {"DIT", "Depth of Inheritance Tree", C, "extends-chain length within the project"},
    {"NOC", "Number of Children", C, "direct project subclasses"},
    {"NMO", "Number of Methods Overridden", C, "non-private instance methods redeclaring an ancestor signature"},
    {"NIM", "Number of Inherited Methods", C, "non-private ancestor methods not redeclared"},
    {"NOII", "Number of Implemented Interfaces", C, "directly listed interfaces"},
    {"NODA", "Number of Default Attributes", C, "package-private fields"},
    {"NOPVA", "Number of Private Attributes", C, "private fields"},
    {"NOPRA", "Number of Protected Attributes", C, "protected fields"},
    {"NOFA", "Number of Final Attributes", C, "final fields"},
    {"NOFSA", "Number of Final and Static Attributes", C, "final static fields"},
    {"NOFNSA", "Number of Final and Non-Static Attributes", C, "final instance fields"},
    {"NONFNSA", "Number of Not Final and Non-Static Attributes", C, "non-final instance fields"},
    {"NOSA", "Number of Static Attributes", C, "static fields"},
    {"NONFSA", "Number of Non-Final and Static Attributes", C, "non-final static fields"},
    {"NOABM", "Number of Abstract Methods", C, "abstract methods"},
    {"NOCM", "Number of Constructor Methods", C, "constructors"},
    {"NONCM", "Number of Non-Constructor Methods", C, "methods that are not constructors"},
    {"NOFM", "Number of Final Methods", C, "final methods"},
    {"NOFNSM", "Number of Final and Non-Static Methods", C, "final instance methods"},
    {"NOFSM", "Number of Final and Static Methods", C, "final static methods"},
    {"NONFNABM", "Number of Non-Final and Non-Abstract Methods", C, "methods that are neither final nor abstract"},
    {"NONFNSM", "Number of Non-Final and Non-Static Methods", C, "non-final instance methods"},
    {"NONFSM", "Number of Non-Final and Static Methods", C, "non-final static methods"},
    {"NODM", "Number of Default Methods", C, "package-private methods"},
    {"NOPM", "Number of Private Methods", C, "private methods"},
    {"NOPRM", "Number of Protected Methods", C, "protected methods"},
    {"NOPLM", "Number of Public Methods", C, "public methods"},
    {"NONAM", "Number of Non-Accessors Methods", C, "NOM minus NOAM"},
    {"NOSM", "Number of Static Methods", C, "static methods"},
    {"ATFD", "Access to Foreign Data", C, "sum of ATFD_method over declared methods"},
    {"FANOUT", "Fanout", C, "distinct non-own types used as call targets"},
    {"CFNAMM", "Called Foreign Not Accessor or Mutator Methods", C, "distinct foreign non-accessor methods called"},
    {"CINT", "Coupling Intensity", C, "distinct foreign methods called"},
    {"CDISP", "Coupling Dispersion", C, "distinct classes of CINT methods / CINT, 0 when CINT = 0"},
    {"MAXNESTING", "Maximum Nesting Level", C, "max MAXNESTING_method over declared methods"},
    {"NMCS", "Number of Message Chain Statements", C, "sum of NMCS_method over declared methods"},
    // Package and project level.
    {"LOC_package", "Lines of Code (package)", C, "sum of LOC of top-level types in the package"},
    {"NOCS_package", "Number of Classes (package)", C, "types declared in the package"},
    {"NOM_package", "Number of Methods (package)", C, "sum of NOM over types in the package"},
    {"NOI_package", "Number of Interfaces (package)", C, "interfaces declared in the package"},
    {"LOC_project", "Lines of Code (project)", C, "sum of LOC of top-level types in the project"},
    {"NOPK_project", "Number of Packages (project)", C, "distinct packages"},
    {"NOCS_project", "Number of Classes (project)", C, "types declared in the project"},
    {"NOM_project", "Number of Methods (project)", C, "sum of NOM over project types"},
    {"NOI_project", "Number of Interfaces (project)", C, "interfaces declared in the project"},
    // Method level.
    {"LOC_method", "Lines of Code", M, "non-blank, non-comment lines from declaration to closing brace"},
    {"CYCLO_method", "Cyclomatic Complexity", M, "1 + if, for, while, do, case, catch, ?:, &&, ||"},
    {"MAXNESTING_method", "Maximum Nesting Level", M, "deepest nesting of if/for/while/do/switch/try/synchronized"},
    {"NOP_method", "Number of Parameters", M, "declared parameters"},
    {"NOAV_method", "Number of Accessed Variables", M, "distinct parameters, locals and fields accessed"},
    {"ATLD_method", "Access to Local Data", M, "accesses to own/inherited fields plus own accessor calls"},
    {"NOLV_method", "Number of Local Variables", M, "local, for, for-each, catch and resource variables"},
    {"FANOUT_method", "Fanout", M, "distinct non-own types used as call targets"},
    {"ATFD_method", "Access to Foreign Data", M, "accesses to foreign fields plus foreign accessor calls"},
    {"FDP_method", "Foreign Data Providers", M, "distinct classes providing ATFD data"},
    {"CFNAMM_method", "Called Foreign Not Accessor or Mutator Methods", M, "distinct foreign non-accessor methods called"},
    {"CLNAMM_method", "Called Local Not Accessor or Mutator Methods", M, "distinct own/inherited non-accessor methods called"},
    {"CINT_method", "Coupling Intensity", M, "distinct foreign methods called"},
    {"CDISP_method", "Coupling Dispersion", M, "distinct classes of CINT methods / CINT, 0 when CINT = 0"},
    {"MAMCL_method", "Maximum Message Chain Length", M, "longest call chain in a statement"},
    {"MEMCL_method", "Mean Message Chain Length", M, "mean chain length over message chain statements, 0 if none"},
    {"NMCS_method", "Number of Message Chain Statements", M, "statements holding a chain of 2 or more calls"},
    {"CC_method", "Changing Classes", M, "distinct classes containing callers of the method"},
    {"CM_method", "Changing Methods", M, "distinct project methods calling the method"},
    {"LAA_method", "Locality of Attribute Accesses", M, "ATLD / (ATLD + ATFD), 1 when no accesses"},
    {"CBO_method", "Coupling Between Objects Classes", M, "distinct project classes via parameter, return, instantiation or call"},
}};

}  // namespace

std::string_view to_string(Scope scope) noexcept { return scope == Scope::Class ? "class" : "method"; }

std::span<const MetricDescriptor> registry() { return kRegistry; }

const std::vector<std::string>& acronyms_for(Scope scope) {
  static const std::vector<std::string> class_names = [] {
    std::vector<std::string> names;
    for (const auto& d : kRegistry) {
      if (d.scope == Scope::Class) names.emplace_back(d.acronym);
    }
    return names;
  }();
  static const std::vector<std::string> method_names = [] {
    std::vector<std::string> names;
    for (const auto& d : kRegistry) names.emplace_back(d.acronym);
    return names;
  }();
  return scope == Scope::Class ? class_names : method_names;
}

const MetricDescriptor* find_metric(std::string_view acronym) {
  for (const auto& d : kRegistry) {
    if (d.acronym == acronym) return &d;
  }
  return nullptr;
}

}  // namespace crowdsmell::metrics
