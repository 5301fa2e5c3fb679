#include <doctest.h>

#include "ctxmine/errors.hpp"
#include "ctxmine/extractor.hpp"
#include "ctxmine/strings.hpp"
#include "ctxmine/token_counter.hpp"

using namespace ctxmine::code;
using ctxmine::collapse_whitespace;

namespace {

const char* kTwoMethods = R"(
package demo;

public class Store {
    private int size;

    public Store(int size) {
        this.size = size;
    }

    public int getSize() {
        return size;
    }

    void reset() {
        size = 0;
    }

    abstract void noBody();
}
)";

const char* kFiveStatements = R"(
class Calc {
    int run(int a, int b) {
        int x = a + b;
        int y = x * 2;
        if (y > 10) {
            y = y - 1;
        }
        return y;
    }
}
)";

}  // namespace

TEST_CASE("two method bodies produce two records; constructors are skipped") {
    const auto methods = extract_methods(kTwoMethods, "demo/Store.java");
    REQUIRE(methods.size() == 2);
    CHECK(methods[0].name == "getSize");
    CHECK(methods[0].signature == "int getSize()");
    CHECK(methods[0].arity == 0);
    CHECK(methods[0].class_name == "Store");
    CHECK(methods[1].name == "reset");
    CHECK(methods[1].signature == "void reset()");
    CHECK(methods[0].id != methods[1].id);
}

TEST_CASE("interface with only abstract declarations yields nothing") {
    const char* src = R"(
interface Closer {
    void close();
    int drain(long timeout);
}
)";
    CHECK(extract_methods(src, "Closer.java").empty());
}

TEST_CASE("default interface methods have bodies and are extracted") {
    const char* src = R"(
interface Greeter {
    String name();
    default String greet() { return "hi " + name(); }
}
)";
    const auto methods = extract_methods(src, "Greeter.java");
    REQUIRE(methods.size() == 1);
    CHECK(methods[0].name == "greet");
    CHECK(methods[0].signature == "String greet()");
}

TEST_CASE("five-statement method is segmented as hand-derived") {
    const auto methods = extract_methods(kFiveStatements, "Calc.java");
    REQUIRE(methods.size() == 1);
    const auto& m = methods[0];
    REQUIRE(m.statements.size() == 5);
    CHECK(collapse_whitespace(m.statements[0].text) == "int x = a + b;");
    CHECK(collapse_whitespace(m.statements[1].text) == "int y = x * 2;");
    CHECK(collapse_whitespace(m.statements[2].text) == "if (y > 10) {");
    // The block's closing brace extends the statement before it.
    CHECK(collapse_whitespace(m.statements[3].text) == "y = y - 1; }");
    CHECK(collapse_whitespace(m.statements[4].text) == "return y;");
    for (std::size_t i = 0; i < m.statements.size(); ++i) {
        CHECK(m.statements[i].index == static_cast<int>(i));
        CHECK(m.statements[i].line_start <= m.statements[i].line_end);
        if (i > 0) CHECK(m.statements[i - 1].index < m.statements[i].index);
    }
    // Line spans are absolute file lines: the first statement sits on line 4.
    CHECK(m.statements[0].line_start == 4);
}

TEST_CASE("statements tile the body interior modulo whitespace") {
    const char* sources[] = {kTwoMethods, kFiveStatements};
    for (const char* src : sources) {
        for (const auto& m : extract_methods(src, "X.java")) {
            std::string joined;
            for (const auto& s : m.statements) {
                joined += s.text;
                joined += ' ';
            }
            const std::string interior = m.body.substr(1, m.body.size() - 2);
            CHECK(collapse_whitespace(joined) == collapse_whitespace(interior));
        }
    }
}

TEST_CASE("statement spans reconstruct against the method text") {
    for (const auto& m : extract_methods(kFiveStatements, "Calc.java")) {
        for (const auto& s : m.statements) {
            CHECK(m.text.substr(s.begin, s.end - s.begin) == s.text);
        }
    }
}

TEST_CASE("nested and anonymous class methods attribute to the enclosing class") {
    const char* src = R"(
class Outer {
    class Inner {
        void innerRun() { step(); }
    }
    void outerRun() {
        Runnable r = new Runnable() {
            public void run() { tick(); }
        };
        r.run();
    }
}
)";
    const auto methods = extract_methods(src, "Outer.java");
    REQUIRE(methods.size() == 3);
    CHECK(methods[0].name == "innerRun");
    CHECK(methods[0].class_name == "Outer.Inner");
    CHECK(methods[1].name == "outerRun");
    CHECK(methods[1].class_name == "Outer");
    CHECK(methods[2].name == "run");
    CHECK(methods[2].class_name == "Outer");
}

TEST_CASE("annotations and generics do not confuse member parsing") {
    const char* src = R"(
class Service {
    @Override
    @SuppressWarnings({"unchecked", "rawtypes"})
    public Map<String, List<Integer>> index(List<String> keys) throws IOException {
        return build(keys);
    }
    public static <T extends Comparable<T>> T max(List<T> list) {
        return list.get(0);
    }
}
)";
    const auto methods = extract_methods(src, "Service.java");
    REQUIRE(methods.size() == 2);
    CHECK(methods[0].signature == "Map<String, List<Integer>> index(List<String> keys)");
    CHECK(methods[0].arity == 1);
    CHECK(methods[1].signature == "<T extends Comparable<T>> T max(List<T> list)");
    CHECK(methods[1].arity == 1);
    // The method slice starts at its annotations.
    CHECK(methods[0].text.rfind("@Override", 0) == 0);
}

TEST_CASE("comments are blanked out of the extracted text") {
    const char* src = R"(
class C {
    void go() {
        start(); // begin
        /* done */ stop();
    }
}
)";
    const auto methods = extract_methods(src, "C.java");
    REQUIRE(methods.size() == 1);
    CHECK(methods[0].text.find("begin") == std::string::npos);
    CHECK(methods[0].text.find("done") == std::string::npos);
    REQUIRE(methods[0].statements.size() == 2);
    CHECK(collapse_whitespace(methods[0].statements[0].text) == "start();");
    CHECK(collapse_whitespace(methods[0].statements[1].text) == "stop();");
}

TEST_CASE("token_count equals the default counter on the method text") {
    for (const auto& m : extract_methods(kFiveStatements, "Calc.java")) {
        CHECK(m.token_count == count_budget_tokens(m.text));
        CHECK(m.token_count >= 1);
    }
}

TEST_CASE("unbalanced braces raise ParseError") {
    CHECK_THROWS_AS(extract_methods("class A { void f() { ", "A.java"), ctxmine::ParseError);
    CHECK_THROWS_AS(extract_methods("class A { } }", "A.java"), ctxmine::ParseError);
}

TEST_CASE("filter_by_length keeps the inclusive boundary") {
    std::vector<MethodRecord> methods(3);
    methods[0].id = "a";
    methods[0].token_count = 682;
    methods[1].id = "b";
    methods[1].token_count = 683;
    methods[2].id = "c";
    methods[2].token_count = 1;
    const auto kept = filter_by_length(methods);
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].id == "a");
    CHECK(kept[1].id == "c");
    CHECK(filter_by_length({}).empty());
    // Idempotent and a sublist of its input.
    const auto twice = filter_by_length(kept);
    REQUIRE(twice.size() == kept.size());
    for (std::size_t i = 0; i < twice.size(); ++i) CHECK(twice[i].id == kept[i].id);
}
