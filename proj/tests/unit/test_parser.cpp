#include <gtest/gtest.h>

#include "crowdsmell/error.hpp"
#include "crowdsmell/java/parser.hpp"

using namespace crowdsmell;
using namespace crowdsmell::java;

TEST(Parser, MinimalClass) {
  auto cu = parse_compilation_unit("class A { void m(){} }");
  ASSERT_EQ(cu.types.size(), 1u);
  EXPECT_EQ(cu.types[0]->name, "A");
  ASSERT_EQ(cu.types[0]->methods.size(), 1u);
  EXPECT_EQ(cu.types[0]->methods[0].signature(), "m()");
  EXPECT_TRUE(cu.types[0]->fields.empty());
}

TEST(Parser, PackageImportsAndSupertypes) {
  auto cu = parse_compilation_unit(
      "package a.b;\nimport java.util.*;\nimport static x.Y.z;\n"
      "public final class C<T extends Comparable<T>> extends Base<T> implements I, J<String> {}\n");
  EXPECT_EQ(cu.package_name, "a.b");
  EXPECT_EQ(cu.imports.size(), 2u);
  const auto& c = *cu.types[0];
  ASSERT_EQ(c.extends.size(), 1u);
  EXPECT_EQ(c.extends[0].base, "Base");
  ASSERT_EQ(c.implements.size(), 2u);
  EXPECT_EQ(c.implements[1].base, "J");
  EXPECT_TRUE(c.mods.is_public);
  EXPECT_TRUE(c.mods.is_final);
}

TEST(Parser, SignatureUsesErasedTypes) {
  auto cu = parse_compilation_unit(
      "class A { <K> void put(java.util.Map<K, List<String>> m, int[] xs, String... rest) {} }");
  EXPECT_EQ(cu.types[0]->methods[0].signature(), "put(Map,int[],String[])");
}

TEST(Parser, FieldsEnumsAndNested) {
  auto cu = parse_compilation_unit(R"(
enum Color { RED, GREEN("g") { void f(){} }; private final String code; Color(){ this(""); } Color(String c){ code = c; } }
interface Shape { int SIDES = 4; double area(); default double twice(){ return 2 * area(); } }
class Outer { int a, b[] = {1}; static class Inner { } class Deep { class Deeper {} } }
)");
  ASSERT_EQ(cu.types.size(), 3u);
  const auto& color = *cu.types[0];
  EXPECT_EQ(color.kind, TypeKind::Enum);
  EXPECT_EQ(color.fields.size(), 3u);
  EXPECT_TRUE(color.fields[0].enum_constant);
  EXPECT_TRUE(color.fields[0].mods.is_public && color.fields[0].mods.is_static && color.fields[0].mods.is_final);
  const auto& shape = *cu.types[1];
  EXPECT_TRUE(shape.fields[0].mods.is_public && shape.fields[0].mods.is_static);
  EXPECT_TRUE(shape.methods[0].mods.is_abstract);
  EXPECT_EQ(shape.methods[0].body, nullptr);
  EXPECT_FALSE(shape.methods[1].mods.is_abstract);
  const auto& outer = *cu.types[2];
  EXPECT_EQ(outer.fields.size(), 2u);
  EXPECT_EQ(outer.fields[1].type.dims, 1);
  ASSERT_EQ(outer.nested.size(), 2u);
  EXPECT_EQ(outer.nested[1]->nested.size(), 1u);
}

TEST(Parser, StatementsAndExpressions) {
  const char* src = R"(class A {
  int f(int a) {
    label:
    for (int i = 0, j = 1; i < a; i++, j--) { if (i > j) continue label; else break; }
    for (String s : list) { }
    do { a--; } while (a > 0);
    switch (a) { case 1: case 2: a = 3; break; default: a = 4; }
    try (Reader r = open(); Reader q = open()) { throw new E(); }
    catch (IOException | RuntimeException e) { } finally { }
    synchronized (this) { a >>>= 1; a = a >> 2 >>> 1; }
    Runnable run = () -> { a++; };
    java.util.function.Function<Integer, Integer> g = x -> x + 1;
    int[][] grid = new int[3][];
    Object o = (Object) (a > 1 ? "s" : null);
    boolean ok = o instanceof String && (List<String>) o != null;
    assert a > 0 : "neg";
    new Thread() { public void run() {} }.start();
    x.<String>make().y[0].z = A.this.f(1);
    Supplier<A> s = A::new;
    Class<?> c = int[].class;
    return (int) a;
  }
})";
  auto cu = parse_compilation_unit(src);
  const auto& body = *cu.types[0]->methods[0].body;
  ASSERT_EQ(body.kind, StmtKind::Block);
  EXPECT_EQ(body.block.size(), 17u);
  EXPECT_EQ(body.block[0]->kind, StmtKind::Labeled);
  EXPECT_EQ(body.block[1]->kind, StmtKind::ForEach);
  EXPECT_EQ(body.block[3]->kind, StmtKind::Switch);
  EXPECT_EQ(body.block[3]->cases.size(), 3u);
  EXPECT_EQ(body.block[4]->kind, StmtKind::Try);
  EXPECT_EQ(body.block[4]->vars.size(), 2u);
  EXPECT_EQ(body.block[4]->catches[0].types.size(), 2u);
  EXPECT_EQ(body.block[6]->vars[0].init->kind, ExprKind::Lambda);
  EXPECT_EQ(body.block[9]->vars[0].init->kind, ExprKind::Cast);
  EXPECT_EQ(body.block.back()->kind, StmtKind::Return);
}

TEST(Parser, GenericComparisonsAreNotTypeArguments) {
  auto cu = parse_compilation_unit("class A { boolean m(int a, int b, int c) { return a < b && b > c; } }");
  const auto& ret = *cu.types[0]->methods[0].body->block[0];
  ASSERT_EQ(ret.expr->kind, ExprKind::Binary);
  EXPECT_EQ(ret.expr->name, "&&");
}

TEST(Parser, MethodLinesSkipAnnotations) {
  auto cu = parse_compilation_unit("class A {\n  @Override\n  public String toString() {\n    return \"\";\n  }\n}\n");
  const auto& m = cu.types[0]->methods[0];
  EXPECT_EQ(m.begin_line, 3);
  EXPECT_EQ(m.end_line, 5);
  EXPECT_EQ(cu.count_code_lines(m.begin_line, m.end_line), 3);
}

TEST(Parser, SyntaxErrorsCarryCode) {
  try {
    parse_compilation_unit("class Bad { void m( { }");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
  }
}
