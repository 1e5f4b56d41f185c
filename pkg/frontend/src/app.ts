/** DOM wiring for the stepping UI. */

import { makeClient } from './api.js'
import { PRESETS } from './presets.js'
import { inlineDiagnostic, statusLabel, traceLines } from './render.js'
import { SessionController, UiSessionState } from './state.js'

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id)
  if (!node) throw new Error(`missing element #${id}`)
  return node as T
}

export function mount(): SessionController {
  const controller = new SessionController(makeClient(''))

  const programBox = el<HTMLTextAreaElement>('program')
  const exprBox = el<HTMLInputElement>('expr')
  const presetSelect = el<HTMLSelectElement>('preset')
  const tracePane = el<HTMLPreElement>('trace')
  const statusBadge = el<HTMLSpanElement>('status')
  const diagnosticsPane = el<HTMLPreElement>('diagnostics')
  const bannerPane = el<HTMLDivElement>('banner')
  const warningsPane = el<HTMLDivElement>('warnings')

  const runBtn = el<HTMLButtonElement>('run')
  const stepBtn = el<HTMLButtonElement>('step')
  const step10Btn = el<HTMLButtonElement>('step10')
  const stepEndBtn = el<HTMLButtonElement>('stepEnd')
  const forceBtn = el<HTMLButtonElement>('force')
  const resetBtn = el<HTMLButtonElement>('reset')

  for (const preset of PRESETS) {
    const option = document.createElement('option')
    option.value = preset.name
    option.textContent = preset.name
    presetSelect.appendChild(option)
  }

  function loadPreset(name: string): void {
    const preset = PRESETS.find((p) => p.name === name)
    if (!preset) return
    controller.setProgram(preset.program)
    controller.setExpr(preset.expr)
    programBox.value = preset.program
    exprBox.value = preset.expr
  }

  presetSelect.addEventListener('change', () => loadPreset(presetSelect.value))
  programBox.addEventListener('input', () => controller.setProgram(programBox.value))
  exprBox.addEventListener('input', () => controller.setExpr(exprBox.value))

  runBtn.addEventListener('click', () => void controller.create())
  stepBtn.addEventListener('click', () => void controller.step(1))
  step10Btn.addEventListener('click', () => void controller.step(10))
  stepEndBtn.addEventListener('click', () => void controller.stepToEnd())
  forceBtn.addEventListener('click', () => void controller.force())
  resetBtn.addEventListener('click', () => void controller.reset())

  function redraw(state: UiSessionState): void {
    tracePane.textContent = traceLines(state.entries)
      .map((l) => l.text)
      .join('\n')
    statusBadge.textContent = statusLabel(state.status, state.pending)

    const stepping = controller.canStep && !state.pending
    stepBtn.disabled = !stepping
    step10Btn.disabled = !stepping
    stepEndBtn.disabled = !stepping
    forceBtn.disabled = state.sessionId === null || state.pending
    runBtn.disabled = state.pending

    if (state.diagnostic) {
      const inline = inlineDiagnostic(state.diagnostic, state.program)
      diagnosticsPane.textContent = [inline.heading, ...inline.excerpt].join('\n')
      diagnosticsPane.hidden = false
    } else {
      diagnosticsPane.textContent = ''
      diagnosticsPane.hidden = true
    }

    if (state.banner) {
      bannerPane.textContent = `${state.banner} - click Run or Step to retry`
      bannerPane.hidden = false
    } else {
      bannerPane.hidden = true
    }

    if (state.warnings.length) {
      warningsPane.textContent = state.warnings.join('\n')
      warningsPane.hidden = false
    } else {
      warningsPane.hidden = true
    }

    tracePane.scrollTop = tracePane.scrollHeight
  }

  controller.onChange(redraw)
  loadPreset(PRESETS[0].name)
  redraw(controller.state)
  return controller
}

if (typeof document !== 'undefined' && document.getElementById('program')) {
  mount()
}
