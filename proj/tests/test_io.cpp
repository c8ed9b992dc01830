#include "liebm/ensemble_io.hpp"
#include "liebm/flow.hpp"
#include "liebm/report.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace liebm;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / "liebm_tests";
    fs::create_directories(dir);
    fs::path p = dir / name;
    fs::remove(p);
    return p;
}

VerificationReport sample_report(const std::string& id, Verdict v) {
    VerificationReport r;
    r.identity = id;
    r.group = "so3";
    r.estimate = 0.123456789012345;
    r.std_error = 1e-3;
    r.samples = 1000;
    r.references.push_back({"closed", 0.12, "closed-form"});
    r.difference = r.estimate - 0.12;
    r.verdict = v;
    r.seed = 42;
    r.config = {{"T", 1.0}, {"N", 200}};
    r.details = {{"note", "x"}};
    r.seal();
    return r;
}

}  // namespace

TEST_SUITE("report") {

TEST_CASE("decision rule") {
    CHECK(decide(0.02, 0.01, 0.0) == Verdict::Pass);
    CHECK(decide(0.04, 0.01, 0.0) == Verdict::Fail);
    CHECK(decide(0.04, 0.01, 0.05) == Verdict::Pass);
    CHECK(decide(-0.04, 0.01, 0.05) == Verdict::Pass);
    CHECK(decide(0.04, 2.0, 0.0, 1.0) == Verdict::Inconclusive);
    for (Verdict v : {Verdict::Pass, Verdict::Fail, Verdict::Inconclusive}) CHECK(verdict_from_string(to_string(v)) == v);
    CHECK_THROWS(verdict_from_string("maybe"));
}

TEST_CASE("FNV-1a test vectors") {
    CHECK(fnv1a("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
    CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("config digest follows the config") {
    VerificationReport a = sample_report("x", Verdict::Pass), b = a;
    CHECK(a.config_digest == b.config_digest);
    b.config["N"] = 400;
    b.seal();
    CHECK(a.config_digest != b.config_digest);
}

TEST_CASE("ledger round trip") {
    fs::path p = scratch("ledger.jsonl");
    std::vector<VerificationReport> rs{sample_report("a", Verdict::Pass), sample_report("b", Verdict::Fail)};
    append_ledger(p.string(), rs);
    append_ledger(p.string(), {sample_report("c", Verdict::Inconclusive)});
    auto back = read_ledger(p.string());
    REQUIRE(back.size() == 3);
    CHECK(to_json(back[0]) == to_json(rs[0]));
    CHECK(back[2].verdict == Verdict::Inconclusive);
    CHECK_THROWS(read_ledger(scratch("missing.jsonl").string()));
}

TEST_CASE("csv round trip") {
    std::vector<VerificationReport> rs{sample_report("a", Verdict::Pass), sample_report("b,c", Verdict::Fail)};
    std::string csv = to_csv(rs);
    CHECK(csv.rfind("identity,group,estimate,std_error,reference,verdict,seed", 0) == 0);
    auto rows = parse_csv(csv);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].identity == "b,c");
    CHECK(rows[0].estimate == rs[0].estimate);
    CHECK(rows[0].reference == 0.12);
    CHECK(rows[1].verdict == "fail");
    CHECK(rows[0].seed == 42);
    CHECK(render_table(rs).find("fail") != std::string::npos);
}

}

TEST_SUITE("ensemble") {

TEST_CASE("simulate and audit") {
    LieGroup g = LieGroup::special_orthogonal(3);
    TimeGrid grid(1.0, 12);
    fs::path a = scratch("a.ens"), b = scratch("b.ens"), c = scratch("c.ens");
    EnsembleSummary sa = simulate_ensemble(a.string(), g, grid, 25, 7);
    EnsembleSummary sb = simulate_ensemble(b.string(), g, grid, 25, 7);
    EnsembleSummary sc = simulate_ensemble(c.string(), g, grid, 25, 8);
    CHECK(sa.digest == sb.digest);
    CHECK(sa.digest != sc.digest);
    EnsembleSummary audit = audit_ensemble(a.string());
    CHECK(audit.digest == sa.digest);
    CHECK(audit.bad_frames == 0);
    CHECK(audit.paths == 25);

    EnsembleReader reader(a.string());
    CHECK(reader.header().group == "so3");
    CHECK(reader.header().grid == grid);
    EnsembleFrame f;
    REQUIRE(reader.next(f));
    CHECK(f.valid);
    CHECK(max_distance(f.path, sample_bm(g, grid, {7, 0})) == 0.0);
}

TEST_CASE("corruption is detected") {
    LieGroup g = LieGroup::torus(2);
    fs::path a = scratch("bad.ens");
    EnsembleSummary s = simulate_ensemble(a.string(), g, TimeGrid(1.0, 10), 5, 1);
    auto size = fs::file_size(a);
    {
        std::fstream io(a, std::ios::in | std::ios::out | std::ios::binary);
        io.seekp(static_cast<std::streamoff>(size - 20));
        char byte = 0x55;
        io.write(&byte, 1);
    }
    EnsembleSummary audit = audit_ensemble(a.string());
    CHECK(audit.bad_frames == 1);
    CHECK(audit.digest != s.digest);

    fs::path junk = scratch("junk.ens");
    std::ofstream(junk) << "not an ensemble";
    CHECK_THROWS_AS(EnsembleReader(junk.string()), EnsembleFormatError);

    fs::resize_file(a, size - 3);
    CHECK_THROWS_AS(audit_ensemble(a.string()), EnsembleFormatError);
}

TEST_CASE("csv export") {
    LieGroup g = LieGroup::torus(1);
    std::string csv = path_to_csv(sample_bm(g, TimeGrid(1.0, 4), {0, 0}));
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);  // comment, header, five nodes
}

}
