#include <math.h>
#include <stdio.h>

#include "lcdrive.h"

int main(void) {
    LcdSpec spec;
    if (lcd_spec_default(LCD_KIND_LCD, 4, 2.0, &spec) != LCD_STATUS_OK) return 1;
    if (lcd_theory_lambda_f(&spec, &spec.lambda_f) != LCD_STATUS_OK) return 2;

    LcdRunResult *r = NULL;
    if (lcd_run(&spec, &r) != LCD_STATUS_OK) return 3;
    double f = 0.0;
    lcd_run_result_summary(r, &f, NULL, NULL, NULL);
    lcd_run_result_free(r);

    spec.sites = 0;
    if (lcd_run(&spec, &r) != LCD_STATUS_INVALID_ARGUMENT) return 4;
    const char *msg = lcd_last_error_message();
    if (msg == NULL) return 5;

    printf("F=%.6f\n", f);
    return (f > 0.5 && f < 1.0) ? 0 : 6;
}
