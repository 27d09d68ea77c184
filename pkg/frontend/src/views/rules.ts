/** Threshold controls: edit rule condition bounds, re-evaluate live.
 *
 * Malformed numbers surface as inline errors next to the offending field
 * and block the request. Applying valid edits calls the service's
 * re-evaluate endpoint; an Undo affordance returns to the parent handle.
 */
import { Store, ViewState } from "../state.js";
import type { ConditionDoc, RuleSetDoc } from "../types.js";

export function mountRulesView(root: HTMLElement, store: Store): void {
  root.classList.add("rules-view");
  root.innerHTML = `
    <div class="panel-title">Risk Thresholds</div>
    <form class="rule-form"></form>
    <div class="rule-actions">
      <button type="button" class="apply">Re-evaluate</button>
      <button type="button" class="undo" disabled>Undo</button>
      <span class="status"></span>
    </div>
  `;
  const form = root.querySelector(".rule-form") as HTMLFormElement;
  const apply = root.querySelector(".apply") as HTMLButtonElement;
  const undo = root.querySelector(".undo") as HTMLButtonElement;
  const status = root.querySelector(".status") as HTMLElement;

  apply.addEventListener("click", () => {
    const result = collectEdits(form, store.state);
    if (result.ok) {
      void store.applyRules(result.rules);
    }
    // invalid fields already carry inline errors; no request is sent
  });
  undo.addEventListener("click", () => void store.undoReevaluate());

  let renderedFor = "";
  store.subscribe((state) => {
    root.dataset.analysisId = state.analysisId ?? "";
    apply.disabled = state.reevaluating || !state.analysisId;
    undo.disabled = !state.parentId;
    status.textContent = state.reevaluating ? "re-evaluating..." : "";
    // rebuild the fields only when the draft changes analyses, so typing survives renders
    const key = `${state.analysisId}`;
    if (key !== renderedFor) {
      renderedFor = key;
      buildForm(form, state);
    }
  });
  buildForm(form, store.state);
}

function buildForm(form: HTMLFormElement, state: ViewState): void {
  form.textContent = "";
  const draft = state.rulesDraft;
  if (!draft) {
    const empty = document.createElement("div");
    empty.className = "empty";
    empty.textContent = "rules appear once an analysis is loaded";
    form.appendChild(empty);
    return;
  }
  draft.rules.forEach((rule, ruleIndex) => {
    const fieldset = document.createElement("fieldset");
    const legend = document.createElement("legend");
    legend.textContent = `${rule.label} (${rule.region})`;
    fieldset.appendChild(legend);
    rule.conditions.forEach((condition, condIndex) => {
      fieldset.appendChild(conditionRow(condition, ruleIndex, condIndex));
    });
    form.appendChild(fieldset);
  });
}

function conditionRow(condition: ConditionDoc, ruleIndex: number, condIndex: number): HTMLElement {
  const row = document.createElement("div");
  row.className = "condition-row";

  const name = document.createElement("span");
  name.className = "measure";
  name.textContent = `${condition.measure} ${condition.comparator}`;
  row.appendChild(name);

  const fields: [string, number | undefined][] =
    condition.comparator === "gt" || condition.comparator === "lt"
      ? [["threshold", condition.threshold]]
      : [
          ["low", condition.low],
          ["high", condition.high],
        ];
  for (const [field, value] of fields) {
    const input = document.createElement("input");
    input.type = "text";
    input.value = value === undefined ? "" : String(value);
    input.dataset.rule = String(ruleIndex);
    input.dataset.cond = String(condIndex);
    input.dataset.field = field;
    row.appendChild(input);
  }
  if (condition.unit) {
    const unit = document.createElement("span");
    unit.className = "unit";
    unit.textContent = condition.unit;
    row.appendChild(unit);
  }
  const error = document.createElement("span");
  error.className = "field-error";
  row.appendChild(error);
  return row;
}

export interface EditResult {
  ok: boolean;
  rules: RuleSetDoc;
  errors: number;
}

/** Read the form back into a rule-set document, marking bad fields inline. */
export function collectEdits(form: HTMLFormElement, state: ViewState): EditResult {
  const draft = state.rulesDraft;
  const rules: RuleSetDoc = JSON.parse(JSON.stringify(draft ?? { rules: [] }));
  let errors = 0;
  for (const input of form.querySelectorAll<HTMLInputElement>("input[data-field]")) {
    const row = input.closest(".condition-row") as HTMLElement;
    const errorNode = row.querySelector(".field-error") as HTMLElement;
    const value = Number(input.value.trim());
    const valid = input.value.trim() !== "" && Number.isFinite(value);
    input.classList.toggle("invalid", !valid);
    if (!valid) {
      errors += 1;
      errorNode.textContent = "not a number";
      continue;
    }
    errorNode.textContent = "";
    const condition =
      rules.rules[Number(input.dataset.rule)].conditions[Number(input.dataset.cond)];
    (condition as unknown as Record<string, number>)[input.dataset.field as string] = value;
  }
  // range sanity: low must stay below high, flagged on the low field
  for (const rule of rules.rules) {
    for (const condition of rule.conditions) {
      if (
        (condition.comparator === "in_range" || condition.comparator === "out_of_range") &&
        condition.low !== undefined &&
        condition.high !== undefined &&
        !(condition.low < condition.high)
      ) {
        errors += 1;
        markRangeError(form, rules.rules.indexOf(rule), rule.conditions.indexOf(condition));
      }
    }
  }
  return { ok: errors === 0, rules, errors };
}

function markRangeError(form: HTMLFormElement, ruleIndex: number, condIndex: number): void {
  const input = form.querySelector<HTMLInputElement>(
    `input[data-rule="${ruleIndex}"][data-cond="${condIndex}"][data-field="low"]`,
  );
  const row = input?.closest(".condition-row");
  if (input) input.classList.add("invalid");
  const errorNode = row?.querySelector(".field-error") as HTMLElement | null;
  if (errorNode) errorNode.textContent = "low must be below high";
}
