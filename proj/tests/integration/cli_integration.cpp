// End-to-end checks of the bias-lab binary: exit codes, output grammar and
// byte-for-byte reproducibility. argv[1] is the binary path.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

int g_failures = 0;
std::string g_binary;

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run(const std::string& args) {
    std::string path = "/tmp/apbias_cli_out.txt";
    std::string cmd = g_binary + " " + args + " > " + path + " 2>/dev/null";
    int rc = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = (rc == -1) ? -1 : WEXITSTATUS(rc);
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    r.out = ss.str();
    return r;
}

void check(const std::string& name, bool ok, const std::string& detail = "") {
    if (!ok) ++g_failures;
    std::printf("%s %s%s\n", ok ? "[ ok ]" : "[FAIL]", name.c_str(),
                detail.empty() ? "" : ("  " + detail).c_str());
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: cli_integration <bias-lab path>\n");
        return 2;
    }
    g_binary = argv[1];

    // usage errors -> exit 2
    check("exit-2-q-below-3", run("constants --q 2 --p1 1000000").exit_code == 2);
    check("exit-2-bad-subcommand", run("frobnicate").exit_code == 2);
    check("exit-2-missing-required", run("count --q 4").exit_code == 2);

    // resource guard -> exit 4
    check("exit-4-huge-x-budget", run("count --x 1e18 --q 4 --sig 3^2").exit_code == 4);
    check("exit-4-astronomical-x", run("count --x 1e20 --q 4 --sig 3^2").exit_code == 4);

    // constants CSV carries the reference values
    {
        auto r = run("constants --q 4 --format csv --p0 200000 --p1 2000000");
        check("constants-csv-exit", r.exit_code == 0);
        check("constants-csv-header", contains(r.out, "q,a,C,M,err"));
        check("constants-csv-c41", contains(r.out, "4,1,-0.33498"));
        check("constants-csv-c43", contains(r.out, "4,3,0.33498"));
    }

    // counts
    {
        auto r = run("count --x 100 --q 4 --sig 3^2 --format csv");
        check("count-sig-exit", r.exit_code == 0);
        check("count-sig-value", contains(r.out, "100,2,4,3^2,6,"));
    }
    {
        auto r = run("count --x 100 --q 4 --k 2 --all --format json");
        check("count-all-exit", r.exit_code == 0);
        check("count-all-schema", contains(r.out, "\"schema\":\"ap-bias-lab/v1\""));
        check("count-all-total", contains(r.out, "\"signature\":\"all-coprime\",\"count\":16"));
        check("count-all-33", contains(r.out, "\"signature\":\"3^2\",\"count\":6"));
    }

    // byte-identical reports across runs and worker counts
    {
        auto a = run("constants --q 7 --format json --p0 200000 --p1 2000000 --workers 2");
        auto b = run("constants --q 7 --format json --p0 200000 --p1 2000000 --workers 2");
        check("constants-bytes-stable", a.exit_code == 0 && a.out == b.out);
        auto c = run("count --x 100000 --q 4 --k 2 --all --format csv --workers 1");
        auto d = run("count --x 100000 --q 4 --k 2 --all --format csv --workers 8");
        check("count-bytes-worker-independent", c.exit_code == 0 && c.out == d.out);
    }

    // euler-ratio and diagnose
    {
        auto r = run("euler-ratio --q 4 --a 3 --A 1 --format json --p0 200000 --p1 2000000");
        check("euler-ratio-exit", r.exit_code == 0);
        check("euler-ratio-fields", contains(r.out, "\"value\":") && contains(r.out, "\"tail_bound\":"));
        auto rg = run("euler-ratio --q 4 --sig 1*3 --e 0.5 --e 0.5 --A 1 --format json --p0 200000 --p1 2000000");
        check("euler-ratio-general-one", rg.exit_code == 0 && contains(rg.out, "\"value\":1"));
        auto rd = run("diagnose --q 13 --a 8 --x 1e6 --format json --p1 1000000");
        check("diagnose-least-prime", rd.exit_code == 0 && contains(rd.out, "\"least_prime\":47"));
    }

    // characters export
    {
        auto r = run("characters --q 7 --format json");
        check("characters-exit", r.exit_code == 0);
        check("characters-phi", contains(r.out, "\"phi\":6"));
        check("characters-turns", contains(r.out, "\"turn\":"));
    }

    // compare report
    {
        auto r = run("compare --q 4 --sig 3^2 --x 1e5 --x 1e6 --format csv --p0 200000 --p1 2000000");
        check("compare-exit", r.exit_code == 0);
        check("compare-header", contains(r.out, "observed_ratio,predicted_ratio,residual_times_loglog"));
        check("compare-two-rows", r.out.find("100000,") != std::string::npos &&
                                      r.out.find("1000000,") != std::string::npos);
    }

    // sieve cache honors BIAS_LAB_CACHE_DIR
    {
        int rc_setup = std::system("rm -rf /tmp/apbias_cache_env && mkdir -p /tmp/apbias_cache_env");
        (void)rc_setup;
        auto r = run("count --x 100000 --q 4 --sig 3^2 --cache-dir /tmp/apbias_cache_env --format csv");
        std::ifstream probe("/tmp/apbias_cache_env/sieve-33333-m4.apb");
        check("cache-dir-file-created", r.exit_code == 0 && probe.good());
        std::string env_cmd = "BIAS_LAB_CACHE_DIR=/tmp/apbias_cache_env " + g_binary +
                              " count --x 100000 --q 4 --sig 3^2 --format csv > /tmp/apbias_cli_out.txt";
        int rc = std::system(env_cmd.c_str());
        check("cache-env-var-run", rc != -1 && WEXITSTATUS(rc) == 0);
    }

    // degraded cutoff makes the reference-constants check fail -> exit 3
    {
        auto r = run("selftest --p0 2000 --p1 1000000");
        check("selftest-degraded-exit-3", r.exit_code == 3, "exit=" + std::to_string(r.exit_code));
        check("selftest-degraded-reports-failure", contains(r.out, "[FAIL]"));
    }

    // the large non-cyclic group keeps all checks green
    {
        auto r = run("selftest --q 360 --p1 2000000");
        check("selftest-with-360", r.exit_code == 0, "exit=" + std::to_string(r.exit_code));
    }

    std::printf("cli integration: %d failures\n", g_failures);
    return g_failures;
}
