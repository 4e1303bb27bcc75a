"""Halt-point phases.

Each tagged operation passes through a fixed set of phases, so one hook
site can serve several breakpoint types. A hook carries two locations:
the one breakpoints are matched against (always a tagged location, e.g.
the send site for receiver-side halts) and the one reported to the
client as where execution stands.
"""

STATEMENT = "statement"
BEFORE_ACTIVITY_CREATION = "before-activity-creation"
ACTIVITY_FIRST_STATEMENT = "activity-first-statement"
BEFORE_JOIN = "before-join"
AFTER_JOIN = "after-join"
BEFORE_MESSAGE_SEND = "before-message-send"
TURN_START = "turn-start"
ASYNC_ACTIVATION = "async-activation"
TURN_RETURN = "turn-return"
BEFORE_PROMISE_RESOLUTION = "before-promise-resolution"
PROMISE_HANDLER_START = "promise-handler-start"
BEFORE_CHANNEL_SEND = "before-channel-send"
AFTER_CHANNEL_SEND = "after-channel-send"
BEFORE_CHANNEL_RECEIVE = "before-channel-receive"
AFTER_CHANNEL_RECEIVE = "after-channel-receive"
BEFORE_TRANSACTION = "before-transaction"
BEFORE_COMMIT = "before-commit"
AFTER_COMMIT = "after-commit"
BEFORE_ACQUIRE = "before-acquire"
AFTER_ACQUIRE = "after-acquire"
BEFORE_RELEASE = "before-release"
AFTER_RELEASE = "after-release"

# Which phase each shipped breakpoint type halts at.
BREAKPOINT_PHASE = {
    "activity-creation": BEFORE_ACTIVITY_CREATION,
    "activity-execution": ACTIVITY_FIRST_STATEMENT,
    "before-join": BEFORE_JOIN,
    "after-join": AFTER_JOIN,
    "actor-message-send": BEFORE_MESSAGE_SEND,
    "actor-message-receiver": TURN_START,
    "before-async-method-activation": ASYNC_ACTIVATION,
    "after-async-method-activation": TURN_RETURN,
    "before-promise-resolution": BEFORE_PROMISE_RESOLUTION,
    "on-promise-resolution": PROMISE_HANDLER_START,
    "before-channel-send": BEFORE_CHANNEL_SEND,
    "after-channel-receive": AFTER_CHANNEL_RECEIVE,
    "before-channel-receive": BEFORE_CHANNEL_RECEIVE,
    "after-channel-send": AFTER_CHANNEL_SEND,
    "before-transaction": BEFORE_TRANSACTION,
    "before-commit": BEFORE_COMMIT,
    "after-commit": AFTER_COMMIT,
    "before-acquire": BEFORE_ACQUIRE,
    "after-acquire": AFTER_ACQUIRE,
    "before-release": BEFORE_RELEASE,
    "after-release": AFTER_RELEASE,
}
