#include <stdbool.h>
#include <stdio.h>
#include <string.h>

#include "sigma_sheaf.h"

int main(void) {
    bool accepted = false;
    if (ss_verify_record("protocol=schnorr p=23 q=11 g=2 y=8 a=9 e=4 z=6", &accepted) != SS_STATUS_OK) {
        return 1;
    }
    SsSuite *suite = NULL;
    SsStatus bad = ss_suite_new("p = 22", &suite);
    if (ss_suite_new("protocol = \"schnorr\"\np = 23\nq = 11\ng = 2\nx = 3\nchecks = [\"hvzk\"]\n", &suite) != SS_STATUS_OK) {
        fprintf(stderr, "%s\n", ss_last_error());
        return 1;
    }
    bool passed = false;
    char *report = NULL;
    if (ss_suite_run(suite, &passed) != SS_STATUS_OK || ss_suite_report(suite, SS_EMIT_MACHINE, &report) != SS_STATUS_OK) {
        fprintf(stderr, "%s\n", ss_last_error());
        return 1;
    }
    printf("accepted=%d config=%d overall=%s\n", accepted, (int)bad, strstr(report, "\"overall\": \"pass\"") ? "pass" : "fail");
    ss_string_free(report);
    ss_suite_free(suite);
    return 0;
}
