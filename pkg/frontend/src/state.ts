/**
 * Session state machine for the stepping UI.
 *
 * Keeps the invariant that at most one step request is in flight per
 * session: clicks that arrive while busy (locally pending or a 409 from
 * the service) are queued and drained afterwards.  Network failures
 * surface as a retryable banner; 422 diagnostics attach to the editor.
 */

import {
  ApiError,
  Diagnostic,
  ServiceClient,
  SessionStatus,
  TraceEntry,
} from './api.js'

export interface UiSessionState {
  sessionId: string | null
  entries: TraceEntry[]
  status: SessionStatus | 'idle'
  program: string
  expr: string
  pending: boolean
  queuedSteps: number
  diagnostic: Diagnostic | null
  banner: string | null
  warnings: string[]
}

export function initialState(): UiSessionState {
  return {
    sessionId: null,
    entries: [],
    status: 'idle',
    program: '',
    expr: '',
    pending: false,
    queuedSteps: 0,
    diagnostic: null,
    banner: null,
    warnings: [],
  }
}

export type Listener = (state: UiSessionState) => void

export class SessionController {
  state: UiSessionState = initialState()
  private listeners: Listener[] = []

  constructor(private api: ServiceClient) {}

  onChange(listener: Listener): void {
    this.listeners.push(listener)
  }

  private notify(): void {
    for (const l of this.listeners) l(this.state)
  }

  private patch(changes: Partial<UiSessionState>): void {
    this.state = { ...this.state, ...changes }
    this.notify()
  }

  setProgram(text: string): void {
    this.patch({ program: text })
  }

  setExpr(text: string): void {
    this.patch({ expr: text })
  }

  get canStep(): boolean {
    return this.state.sessionId !== null && this.state.status === 'running'
  }

  async create(): Promise<void> {
    if (this.state.pending) return
    const old = this.state.sessionId
    this.patch({
      pending: true,
      diagnostic: null,
      banner: null,
      entries: [],
      sessionId: null,
      status: 'idle',
      queuedSteps: 0,
      warnings: [],
    })
    if (old !== null) {
      this.api.deleteSession(old).catch(() => undefined)
    }
    try {
      const result = await this.api.createSession(this.state.program, this.state.expr)
      this.patch({
        pending: false,
        sessionId: result.id,
        entries: [result.entry],
        status: 'running',
        warnings: result.warnings ?? [],
      })
    } catch (err) {
      this.fail(err, 'could not create the session')
    }
  }

  async step(n = 1): Promise<void> {
    if (this.state.sessionId === null) {
      this.patch({ banner: 'create a session first' })
      return
    }
    if (!this.canStep) return
    if (this.state.pending) {
      this.patch({ queuedSteps: this.state.queuedSteps + n })
      return
    }
    this.patch({ pending: true, banner: null })
    try {
      const result = await this.api.stepSession(this.state.sessionId, n)
      this.patch({
        pending: false,
        entries: [...this.state.entries, ...result.entries],
        status: result.status,
      })
      this.drainQueue()
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        // the service is already stepping this session: queue the click
        // and retry shortly after
        this.patch({ pending: false, queuedSteps: this.state.queuedSteps + n })
        setTimeout(() => this.drainQueue(), this.retryDelayMs)
        return
      }
      this.fail(err, 'step request failed')
    }
  }

  /** Delay before retrying a click queued on a busy session. */
  retryDelayMs = 150

  private drainQueue(): void {
    const queued = this.state.queuedSteps
    if (queued > 0 && this.canStep && !this.state.pending) {
      this.patch({ queuedSteps: 0 })
      void this.step(queued)
    }
  }

  async stepToEnd(maxRounds = 10_000): Promise<void> {
    for (let i = 0; i < maxRounds && this.canStep; i++) {
      if (this.state.pending) return
      await this.step(25)
      if (this.state.banner !== null) return
    }
  }

  async force(): Promise<void> {
    if (this.state.sessionId === null || this.state.pending) return
    try {
      const result = await this.api.forceSession(this.state.sessionId)
      this.patch({ status: result.status, banner: null })
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        this.patch({ banner: 'session is busy; try force again' })
        return
      }
      this.fail(err, 'force request failed')
    }
  }

  async reset(): Promise<void> {
    const old = this.state.sessionId
    this.patch({
      sessionId: null,
      entries: [],
      status: 'idle',
      pending: false,
      queuedSteps: 0,
      diagnostic: null,
      banner: null,
      warnings: [],
    })
    if (old !== null) {
      this.api.deleteSession(old).catch(() => undefined)
    }
  }

  private fail(err: unknown, fallback: string): void {
    if (err instanceof ApiError) {
      const diagnostic = err.diagnostic
      if (diagnostic !== null) {
        this.patch({ pending: false, diagnostic })
        return
      }
      if (err.status === 404) {
        this.patch({
          pending: false,
          sessionId: null,
          status: 'idle',
          banner: 'the session expired; create a new one',
        })
        return
      }
      this.patch({ pending: false, banner: `${fallback} (${err.status})` })
      return
    }
    // network trouble: keep the session, offer a retry
    this.patch({ pending: false, banner: `${fallback}; check the service and retry` })
  }
}
