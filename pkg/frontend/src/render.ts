/**
 * Pure rendering helpers: service entries to displayed lines.
 *
 * The trace pane shows the `rendered` strings verbatim; this module only
 * arranges layout (justification lines between expression lines, in the
 * same shape the CLI prints).
 */

import { Diagnostic, TraceEntry } from './api.js'

export interface TraceLine {
  kind: 'expr' | 'just'
  text: string
}

export function traceLines(entries: TraceEntry[]): TraceLine[] {
  const lines: TraceLine[] = []
  entries.forEach((entry, i) => {
    if (i === 0) {
      lines.push({ kind: 'expr', text: `  ${entry.rendered}` })
      return
    }
    lines.push({ kind: 'just', text: `  { ${entry.justification} }` })
    lines.push({ kind: 'expr', text: `= ${entry.rendered}` })
  })
  return lines
}

/** The rendered texts shown, in order; must equal the service's fields. */
export function renderedTexts(entries: TraceEntry[]): string[] {
  return entries.map((e) => e.rendered)
}

export interface InlineDiagnostic {
  /** 1-based line in the program editor, when the service located it. */
  line: number | null
  column: number | null
  heading: string
  /** Source excerpt with a caret marker, when positioned. */
  excerpt: string[]
}

export function inlineDiagnostic(
  diagnostic: Diagnostic,
  program: string,
): InlineDiagnostic {
  const heading =
    diagnostic.line !== null
      ? `${diagnostic.kind} error at line ${diagnostic.line}: ${diagnostic.message}`
      : `${diagnostic.kind} error: ${diagnostic.message}`
  const excerpt: string[] = []
  if (diagnostic.line !== null) {
    const lines = program.split('\n')
    const source = lines[diagnostic.line - 1]
    if (source !== undefined) {
      const label = String(diagnostic.line)
      excerpt.push(`${label} | ${source}`)
      const caretCol = diagnostic.column !== null ? diagnostic.column : 1
      excerpt.push(`${' '.repeat(label.length)} | ${' '.repeat(Math.max(0, caretCol - 1))}^`)
    }
  }
  return {
    line: diagnostic.line,
    column: diagnostic.column,
    heading,
    excerpt,
  }
}

export function statusLabel(status: string, pending: boolean): string {
  if (pending) return 'working...'
  switch (status) {
    case 'idle':
      return 'no session'
    case 'running':
      return 'ready to step'
    case 'done':
      return 'final result reached'
    case 'failed':
      return 'evaluation failed'
    case 'fuel-exhausted':
      return 'step budget exhausted'
    default:
      return status
  }
}
